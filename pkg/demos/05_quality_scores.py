# Curation-quality evaluation over the bundled 30-row fixture:
# per-document precision/recall/F1, macro-aggregated by curation method
# and curator experience, plus the counts-vs-reported consistency audit.

from matstage.metrics import (
    audit_rows,
    group_scores,
    load_bundled_eval_table,
    score_counts,
)

rows = load_bundled_eval_table()
print(f"loaded {len(rows)} document x method rows")

print("\n== by method ==")
for group in group_scores(rows, ["method"]):
    p, r, f1 = group.scores.rounded()
    print(f"  {group.key['method']:10} P={p:6.2f} R={r:6.2f} F1={f1:6.2f} "
          f"docs={group.docs} pages={group.pages}")

print("\n== by curator experience ==")
for group in group_scores(rows, ["curator"]):
    p, r, f1 = group.scores.rounded()
    print(f"  {group.key['curator']:10} P={p:6.2f} R={r:6.2f} F1={f1:6.2f} "
          f"docs={group.docs} pages={group.pages}")

print("\n== by curator x method ==")
for group in group_scores(rows, ["curator", "method"]):
    p, r, f1 = group.scores.rounded()
    print(f"  {group.key['curator']:3} {group.key['method']:10} "
          f"P={p:6.2f} R={r:6.2f} F1={f1:6.2f}")

print("\n== direct scoring ==")
print("  score_counts(13, 1, 0) ->", score_counts(13, 1, 0).rounded())
print("  score_counts(0, 0, 3)  ->", score_counts(0, 0, 3).rounded())

print("\n== consistency audit (reported vs counts) ==")
for mismatch in audit_rows(rows):
    print("  " + mismatch.describe())
