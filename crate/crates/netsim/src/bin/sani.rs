//! Command-line front end: account setup, contact management, publishing,
//! reading and reporting against a local store directory.

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::rngs::OsRng;

use sani_core::{fixtures, Questionnaire};
use sani_netsim::{operator_view, publish, read_post, report, Account, NetsimError, Store};
use sani_stego::EmbedConfig;

#[derive(Parser)]
#[command(name = "sani", about = "Tiered-disclosure publishing over a simulated social network")]
struct Cli {
    /// Store directory (the simulated network).
    #[arg(long, global = true, default_value = "store")]
    store: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the questionnaire wizard and initialize the account.
    Init {
        /// Scenario pack: healthcare, microblog or basic.
        #[arg(long)]
        scenario: String,
        /// Take the pack's preselected answers instead of prompting.
        #[arg(long)]
        defaults: bool,
    },
    /// Manage the contact directory.
    Contacts {
        #[command(subcommand)]
        action: ContactsAction,
    },
    /// Sanitize, seal and publish a message with its stego image.
    Publish {
        #[arg(long)]
        message: String,
        /// Use this PNG as the cover instead of the library.
        #[arg(long)]
        cover: Option<PathBuf>,
    },
    /// Read a post with (or without) a credentials file.
    Read {
        #[arg(long)]
        post: String,
        #[arg(long)]
        keys: Option<PathBuf>,
        /// Print what the operator stores instead of reconstructing.
        #[arg(long)]
        operator: bool,
    },
    /// Owner's report: per-tier texts, preservation and sizes.
    Report {
        #[arg(long)]
        post: String,
    },
    /// Print the byte capacity of a cover image at a cell size.
    Capacity {
        #[arg(long)]
        image: PathBuf,
        #[arg(long, default_value_t = 2)]
        cell_size: u8,
    },
}

#[derive(Subcommand)]
enum ContactsAction {
    /// Register a contact and export their credentials.
    Add {
        id: String,
        #[arg(long)]
        relationship: String,
        /// Credentials output file (default <id>.keys).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Revoke a contact from all future posts.
    Revoke { id: String },
    /// List the directory.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), NetsimError> {
    let store = Store::open(&cli.store);
    match cli.command {
        Command::Init { scenario, defaults } => init(&store, &scenario, defaults),
        Command::Contacts { action } => contacts(&store, action),
        Command::Publish { message, cover } => {
            let account = store.load_account()?;
            let post = publish(&store, &account, &message, cover.as_deref(), &mut OsRng)?;
            println!("published {}", post.id);
            println!("{}", post.text);
            Ok(())
        }
        Command::Read { post, keys, operator } => {
            let post = store.load_post(&post)?;
            if operator {
                let (text, image) = operator_view(&post);
                println!("text: {text}");
                println!("image: {}x{} px", image.width(), image.height());
                return Ok(());
            }
            let account_cfg = load_embed_config(&store)?;
            let credentials = match keys {
                Some(path) => Some(sani_netsim::pipeline::read_keys_file(&path)?),
                None => None,
            };
            let outcome = read_post(&post, credentials.as_ref(), &account_cfg)?;
            println!("level {}", outcome.level);
            println!("{}", outcome.text);
            Ok(())
        }
        Command::Report { post } => {
            let account = store.load_account().map_err(|e| match e {
                NetsimError::NotInitialized => {
                    NetsimError::Denied("no account secrets in this store".into())
                }
                other => other,
            })?;
            let post = store.load_post(&post)?;
            let report = report(&account, &post)?;
            print!("{}", report.render());
            Ok(())
        }
        Command::Capacity { image, cell_size } => {
            let img = sani_stego::io::load_png(&image)?;
            let cfg = EmbedConfig::new(cell_size)?;
            println!("{}", sani_stego::capacity_bytes(&img, &cfg));
            Ok(())
        }
    }
}

fn load_embed_config(store: &Store) -> Result<EmbedConfig, NetsimError> {
    let account = store.load_account()?;
    Ok(EmbedConfig {
        cell_size: account.settings.cell_size,
        tolerance: account.settings.tolerance,
        lsb_bits: 1,
    }
    .validated()?)
}

fn init(store: &Store, scenario: &str, defaults: bool) -> Result<(), NetsimError> {
    let account = if defaults {
        Account::init_with_defaults(scenario, &mut OsRng)?
    } else {
        let pack = fixtures::scenario(scenario)
            .ok_or_else(|| NetsimError::UnknownScenario(scenario.to_string()))?;
        let q = Questionnaire::parse(pack)?;
        let answers = wizard(&q)?;
        Account::init(scenario, &answers, &mut OsRng)?
    };
    store.save_account(&account)?;
    store.seed_default_cover()?;
    println!(
        "initialized {} account with {} levels",
        account.scenario,
        account.n_levels()
    );
    for (name, t) in account.requirements.levels() {
        if t.is_infinite() {
            println!("  {name}: unlimited");
        } else {
            println!("  {name}: up to {t:.2} bits per term");
        }
    }
    Ok(())
}

/// One prompt per (topic, level); empty input takes the pack default.
fn wizard(q: &Questionnaire) -> Result<Vec<Vec<String>>, NetsimError> {
    let stdin = std::io::stdin();
    let mut input = stdin.lock();
    let mut answers = Vec::new();
    for topic in &q.topics {
        println!("\n{}", topic.question);
        for (i, (key, _)) in topic.options.iter().enumerate() {
            println!("  {}) {key}", i + 1);
        }
        let mut topic_answers = Vec::new();
        for (level, name) in q.level_names.iter().enumerate() {
            let default = topic.defaults.get(level).cloned().flatten();
            let hint = default
                .as_deref()
                .map(|d| format!(" [{d}]"))
                .unwrap_or_default();
            loop {
                print!("{name}{hint}: ");
                std::io::stdout().flush().ok();
                let mut line = String::new();
                input.read_line(&mut line).map_err(|e| NetsimError::Io {
                    path: "<stdin>".into(),
                    source: e,
                })?;
                let line = line.trim();
                let choice = if line.is_empty() {
                    default.clone()
                } else if let Ok(n) = line.parse::<usize>() {
                    topic.options.get(n.wrapping_sub(1)).map(|(k, _)| k.clone())
                } else if topic.options.iter().any(|(k, _)| k == line) {
                    Some(line.to_string())
                } else {
                    None
                };
                match choice {
                    Some(key) => {
                        topic_answers.push(key);
                        break;
                    }
                    None => println!("  pick an option number or key"),
                }
            }
        }
        answers.push(topic_answers);
    }
    Ok(answers)
}

fn contacts(store: &Store, action: ContactsAction) -> Result<(), NetsimError> {
    let mut account = store.load_account()?;
    match action {
        ContactsAction::Add {
            id,
            relationship,
            out,
        } => {
            let export = account.add_contact(&id, &relationship)?;
            store.save_account(&account)?;
            let path = out.unwrap_or_else(|| PathBuf::from(format!("{id}.keys")));
            std::fs::write(&path, export.to_text()).map_err(|e| NetsimError::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            println!(
                "added {id} ({relationship}); credentials written to {}",
                path.display()
            );
        }
        ContactsAction::Revoke { id } => {
            account.revoke_contact(&id)?;
            store.save_account(&account)?;
            println!("revoked {id}; effective from the next post");
        }
        ContactsAction::List => {
            for c in &account.contacts {
                println!(
                    "{}\t{}\ttier {}\t{}",
                    c.id,
                    c.relationship,
                    c.tier,
                    if c.revoked { "revoked" } else { "active" }
                );
            }
        }
    }
    Ok(())
}
