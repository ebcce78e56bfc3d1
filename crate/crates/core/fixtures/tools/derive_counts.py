#!/usr/bin/env python3
"""Consistency checker for the bundled corpus/taxonomy fixtures.

The derived hit counts in corpus.tsv were chosen (once, by a linear solve)
so that the healthcare and microblog scenario runs land on these targets:

  healthcare thresholds  (9.92, 10.0, 10.14, inf)      tolerance 0.1
  microblog thresholds   (6.18, 6.39, inf)             tolerance 0.1
  healthcare preservation (77.9, 72.2, 64.1) percent   tolerance 0.5
  microblog preservation  (34.1, 27.5) percent         tolerance 0.5

plus the classification bands that decide which term is visible at which
level, and the rule that a taxonomy parent is never more informative than
its child. Run this after any fixture edit; a non-zero exit means a golden
test in the workspace will break.
"""
import math
import os
import sys

HERE = os.path.dirname(os.path.abspath(__file__))


def load_corpus():
    counts = {}
    total = None
    with open(os.path.join(HERE, "..", "corpus.tsv")) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#N="):
                total = int(line[3:])
            elif line.startswith("#") or not line.strip():
                continue
            else:
                term, hits = line.split("\t")
                counts[term] = int(hits)
    return counts, total


def load_edges():
    edges = []
    labels = {}
    with open(os.path.join(HERE, "..", "taxonomy.tsv")) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#") or not line.strip():
                continue
            sid, label, parent, _surfaces = line.split("\t")
            labels[sid] = label
            if parent != "-":
                edges.append((sid, parent))
    return [(labels[c], labels[p]) for c, p in edges]


def main():
    counts, n = load_corpus()
    ic = {t: -math.log2(h / n) for t, h in counts.items()}
    bad = []

    def chk(cond, msg):
        if not cond:
            bad.append(msg)

    t0, t1, t2 = ic["condition"], ic["infection"], ic["hiv"]
    chk(abs(t0 - 9.92) <= 0.1, "healthcare T0")
    chk(abs(t1 - 10.0) <= 0.1, "healthcare T1")
    chk(abs(t2 - 10.14) <= 0.1, "healthcare T2")
    m0, m1 = ic["spain"], ic["barcelona"]
    chk(abs(m0 - 6.18) <= 0.1, "microblog T0")
    chk(6.3 <= m1 <= 6.40, "microblog T1")

    # classification bands for the two sample messages
    for term in ("june 2008", "several ulcers", "hiv testing", "immune system",
                 "pharyngitis", "pneumonia"):
        chk(ic[term] > t2, f"{term} must stay above T2")
    for term in ("10 days", "physician", "3 times"):
        chk(t1 < ic[term] <= t2, f"{term} must sit in (T1,T2]")
    for term in ("mouth", "pathology"):
        chk(t0 < ic[term] <= t1, f"{term} must sit in (T0,T1]")
    for term in ("june", "days", "structure", "doctor", "testing", "system",
                 "times", "hospital", "disease"):
        chk(ic[term] <= t0, f"{term} must be publishable at healthcare L0")
    for term in ("june 16th", "accenture digital conference",
                 "accenture spain", "key stakeholders"):
        chk(ic[term] > m1, f"{term} must stay above microblog T1")
    chk(m0 < ic["conference"] <= m1, "conference must sit in (T0',T1']")
    for term in ("city", "group", "person", "june"):
        chk(ic[term] <= m0, f"{term} must be publishable at microblog L0")
    chk(ic["lung cancer"] > ic["tumor"] > ic["disease"],
        "walkthrough chain ordering")

    # preservation targets
    orig = ["hiv", "june 2008", "pharyngitis", "10 days", "several ulcers",
            "mouth", "infection", "hospital", "physician", "hiv testing",
            "immune system", "pneumonia", "3 times"]
    lvl2 = ["hiv", "june", "disease", "10 days", "pathology", "mouth",
            "infection", "hospital", "physician", "testing", "system",
            "disease", "3 times"]
    lvl1 = ["infection", "june", "disease", "days", "pathology", "mouth",
            "infection", "hospital", "doctor", "testing", "system",
            "disease", "times"]
    lvl0 = ["condition", "june", "disease", "days", "condition", "structure",
            "condition", "hospital", "doctor", "testing", "system",
            "disease", "times"]
    total_ic = sum(ic[t] for t in orig)
    for terms, target in ((lvl2, 77.9), (lvl1, 72.2), (lvl0, 64.1)):
        got = 100 * sum(ic[t] for t in terms) / total_ic
        chk(abs(got - target) <= 0.5, f"healthcare preservation {target} got {got:.2f}")

    morig = ["barcelona", "june 16th", "accenture digital conference",
             "accenture spain", "key stakeholders"]
    mlvl1 = ["barcelona", "june", "conference", "spain", "person"]
    mlvl0 = ["city", "june", "group", "spain", "person"]
    mtotal = sum(ic[t] for t in morig)
    for terms, target in ((mlvl1, 34.1), (mlvl0, 27.5)):
        got = 100 * sum(ic[t] for t in terms) / mtotal
        chk(abs(got - target) <= 0.5, f"microblog preservation {target} got {got:.2f}")

    for child, parent in load_edges():
        chk(ic[parent] <= ic[child], f"edge {parent} -> {child} not monotone")

    if bad:
        for msg in bad:
            print("FAIL", msg)
        return 1
    print(f"ok: {len(counts)} corpus entries consistent")
    return 0


if __name__ == "__main__":
    sys.exit(main())
