"""Quotas for a two-group census and the audit of a few hand-made summaries.

Run: python3 demos/quotas_and_audit.py
"""
from fairsumm import adverse_impact_audit, enumerate_nai_quotas, make_quotas

census = {"female": 2505, "male": 1532}
k = 50

for notion in ("equal", "proportional"):
    print(notion, make_quotas(notion, k, census))

# a custom split is taken as given, as long as each group can supply it
print("custom", make_quotas("custom", k, census, {"female": 20, "male": 30}))

# audit: which groups look under-represented?
for counts in ({"female": 34, "male": 16}, {"female": 25, "male": 25}, {"female": 40, "male": 10}):
    flags = adverse_impact_audit(counts, census)
    print(counts, {g: list(f) for g, f in flags.items()})

# every split of k that escapes the adverse-impact flag
splits = enumerate_nai_quotas(k, census)
print(f"{len(splits)} splits avoid adverse impact, e.g. {splits[0]} .. {splits[-1]}")
