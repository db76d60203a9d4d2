#!/usr/bin/env python3
"""Generate the synthetic GTD-like fixture under tests/data.

The fixture plants four behavioural archetypes. Groups of one archetype share
preferred targets, weapons, tactics and regions, so the pipeline has a known
structure to recover. Output is fully determined by --seed.
"""
import argparse
import csv
import random
from pathlib import Path

TARGETS = ["Military", "Police", "Government (General)", "Private Citizens & Property", "Business",
           "Religious Figures/Institutions", "Educational Institution", "Transportation", "Utilities",
           "Journalists & Media", "Diplomatic", "Telecommunication"]
WEAPONS = ["Explosives", "Firearms", "Incendiary", "Melee", "Chemical", "Vehicle", "Unknown"]
TACTICS = ["Bombing/Explosion", "Armed Assault", "Assassination", "Hostage Taking (Kidnapping)",
           "Facility/Infrastructure Attack", "Hijacking", "Unarmed Assault"]
REGIONS = ["Middle East & North Africa", "South Asia", "Western Europe", "South America",
           "Sub-Saharan Africa", "Southeast Asia", "North America", "Eastern Europe"]
COUNTRIES = {
    "Middle East & North Africa": ["Iraq", "Syria", "Egypt"],
    "South Asia": ["India", "Pakistan", "Afghanistan"],
    "Western Europe": ["France", "Spain", "United Kingdom"],
    "South America": ["Colombia", "Peru"],
    "Sub-Saharan Africa": ["Nigeria", "Somalia", "Kenya"],
    "Southeast Asia": ["Philippines", "Thailand"],
    "North America": ["United States", "Canada"],
    "Eastern Europe": ["Russia", "Ukraine"],
}

ARCHETYPES = [
    dict(targets=[0, 1, 2], weapons=[0, 1], tactics=[0, 1], regions=[0, 1], suicide=0.35, ideology="islamist"),
    dict(targets=[3, 4, 7], weapons=[2, 3], tactics=[4, 6], regions=[2, 6], suicide=0.0,
         ideology="far_right"),
    dict(targets=[2, 8, 9], weapons=[1, 6], tactics=[2, 3], regions=[3, 5], suicide=0.02,
         ideology="far_left"),
    dict(targets=[1, 5, 10], weapons=[0, 4, 5], tactics=[0, 5], regions=[4, 7], suicide=0.1,
         ideology="ethno_nationalist"),
]

HEADER = ["eventid", "iyear", "gname", "doubtterr", "targtype1_txt", "targtype2_txt", "targtype3_txt",
          "weaptype1_txt", "weaptype2_txt", "weaptype3_txt", "weaptype4_txt", "attacktype1_txt",
          "attacktype2_txt", "attacktype3_txt", "region_txt", "country_txt", "success", "suicide", "multiple",
          "INT_ANY", "nkill", "nwound"]


def pick(rng, preferred, universe, p_preferred):
    if rng.random() < p_preferred:
        return universe[rng.choice(preferred)]
    return rng.choice(universe)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=20240611)
    ap.add_argument("--groups", type=int, default=40)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "tests" / "data")
    args = ap.parse_args()
    rng = random.Random(args.seed)
    args.out.mkdir(parents=True, exist_ok=True)

    groups = []
    for g in range(args.groups):
        arch = g % len(ARCHETYPES)
        name = f"Group {chr(65 + g % 26)}{g // 26} Front"
        if g == 5:
            name = "Front for Liberation, North"  # quoted field with a comma
        groups.append((name, arch))

    rows = []
    event_id = 199500000000
    for name, arch in groups:
        a = ARCHETYPES[arch]
        for _ in range(rng.randint(12, 40)):
            event_id += 1
            year = rng.randint(1995, 2018)
            targets = [pick(rng, a["targets"], TARGETS, 0.85)]
            if rng.random() < 0.25:
                targets.append(pick(rng, a["targets"], TARGETS, 0.85))
            weapons = [pick(rng, a["weapons"], WEAPONS, 0.85)]
            if rng.random() < 0.2:
                weapons.append(pick(rng, a["weapons"], WEAPONS, 0.85))
            tactics = [pick(rng, a["tactics"], TACTICS, 0.85)]
            region = pick(rng, a["regions"], REGIONS, 0.9)
            country = rng.choice(COUNTRIES[region])
            killed = "" if rng.random() < 0.08 else str(rng.randint(0, 12))
            wounded = "" if rng.random() < 0.1 else str(rng.randint(0, 30))
            gname = name
            if rng.random() < 0.1:
                gname = "  " + name.upper().replace(" ", "  ") + " "  # canonicalization case
            rows.append([
                str(event_id), str(year), gname, "1" if rng.random() < 0.08 else "0",
                *(targets + [""] * (3 - len(targets))), *(weapons + [""] * (4 - len(weapons))),
                *(tactics + ["", ""]), region, country,
                "1" if rng.random() < 0.85 else "0", "1" if rng.random() < a["suicide"] else "0",
                "1" if rng.random() < 0.15 else "0", rng.choice(["0", "1", "-9"]), killed, wounded])
    for _ in range(60):
        event_id += 1
        region = rng.choice(REGIONS)
        rows.append([str(event_id), str(rng.randint(1995, 2018)), "Unknown", "0", rng.choice(TARGETS), "", "",
                     rng.choice(WEAPONS), "", "", "", rng.choice(TACTICS), "", "", region,
                     rng.choice(COUNTRIES[region]), "1", "0", "0", "0", "1", "2"])
    rng.shuffle(rows)
    # Malformed rows stay well under the reject-rate ceiling.
    rows.insert(17, [str(event_id + 1), "nineteen", groups[0][0]] + [""] * (len(HEADER) - 3))
    rows.insert(300, [str(event_id + 2), "2003", ""] + [""] * (len(HEADER) - 3))

    with open(args.out / "events.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(HEADER)
        w.writerows(rows)

    with open(args.out / "ideology.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["group", "islamist", "far_left", "ethno_nationalist", "far_right", "other_unknown",
                    "religious", "animal_environmental", "dominant"])
        cats = ["islamist", "far_left", "ethno_nationalist", "far_right", "other_unknown", "religious",
                "animal_environmental"]
        for i, (name, arch) in enumerate(groups):
            if i % 9 == 8:
                continue  # unmapped groups fall back to other_unknown
            dominant = ARCHETYPES[arch]["ideology"]
            flags = {c: 0 for c in cats}
            flags[dominant] = 1
            if i % 7 == 3:
                flags["religious"] = 1
            w.writerow([name] + [flags[c] for c in cats] + [dominant])


if __name__ == "__main__":
    main()
