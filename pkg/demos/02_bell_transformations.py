"""
How two encodings move the Bell state
=====================================

Starting from (|00>+|11>)/sqrt2, the 16 combinations of two encoders give
only four outcomes.  The outcome tells the XOR of the two symbols and
nothing else.
"""

from nqka import analysis

rows = analysis.transformation_rows()
print(f"{'first':>7} {'second':>7}  xor  final state            phase")
for row in rows:
    d = row.as_dict()
    print(f"{d['first']:>7} {d['second']:>7}  {d['xor']}   {d['final']:<22} {d['global_phase']:+d}")
print("all rows match the reference table:", all(r.ok for r in rows))

# %%
# What an honest party can infer from one outcome.
for label in analysis.BELL_TEXT:
    support = sorted(analysis.privacy_posterior(label, 3))
    pretty = ", ".join(f"{a:02b}({b:02b})" for a, b in support)
    print(f"{label.name:>9}: {pretty}")
print("best guess of both foreign symbols succeeds with p =", analysis.guess_success_probability(3))
