"""Reference Okapi BM25 for the 20-passage toy document in test_retrieval.cpp.

Prints one C++ initializer row per query, to be pasted into the test.
Statistics are within the document: N passages, df over passages, avgdl over
passage token counts. k1 = 1.2, b = 0.75, idf = max(0, ln((N - n + 0.5) / (n + 0.5))).
"""
import math
import re

PASSAGES = [
    "Annual report 2015",
    "1. Overview",
    "The company designs storage systems for data centers.",
    "Revenue grew in every region, led by storage sales.",
    "1.1 History",
    "Founded in 1998, the company listed its shares in 2004.",
    "2. Risk factors",
    "Liquidity risk: cash reserves may not cover debt.",
    "Market risk from currency movements affects revenue.",
    "2.1 Liquidity",
    "Cash and cash equivalents fell to 12 million.",
    "The company expects cash flow to recover.",
    "2.2 Credit",
    "Credit risk is concentrated in three customers.",
    "3. Outlook",
    "Storage demand should keep growing next year.",
    "",
    "Risk risk risk.",
    "Data data centers centers storage.",
    "Notes to the accounts",
]

QUERIES = [
    ["cash", "risk"],
    ["storage", "revenue", "storage"],
    ["company", "the", "missing"],
]

K1, B = 1.2, 0.75


def tokens(text):
    return re.findall(r"[a-z0-9]+", text.lower())


def main():
    docs = [tokens(p) for p in PASSAGES]
    n_docs = len(docs)
    avgdl = sum(len(d) for d in docs) / n_docs
    for q in QUERIES:
        row = []
        for d in docs:
            score = 0.0
            for term in sorted(set(q)):
                tf = d.count(term)
                if tf == 0:
                    continue
                df = sum(1 for x in docs if term in x)
                idf = max(0.0, math.log((n_docs - df + 0.5) / (df + 0.5)))
                score += idf * tf * (K1 + 1) / (tf + K1 * (1 - B + B * len(d) / avgdl))
            row.append(score)
        print("{" + ", ".join(repr(s) for s in row) + "},")


if __name__ == "__main__":
    main()
