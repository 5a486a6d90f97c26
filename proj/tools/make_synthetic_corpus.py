#!/usr/bin/env python3
"""Generates data/synthetic_reviews.csv, a small labeled restaurant-review corpus.

Reviews mix neutral sentence fragments with sentiment phrases built from an
adjective and a noun ("the pasta was fresh", "good service"). Every positive
review is followed by its negative twin, which keeps the neutral fragments,
nouns and phrase order and swaps each adjective for its antonym, so only
sentiment words separate the classes. Long reviews reuse their adjectives
across several phrases, as real reviews do. A few reviews carry only neutral
fragments and are labeled negative. The output is deterministic for --seed.
"""

import argparse
import csv
import random

# (positive, negative) adjective pairs.
ADJECTIVES = [
    ("good", "bad"),
    ("great", "terrible"),
    ("excellent", "awful"),
    ("delicious", "bland"),
    ("friendly", "rude"),
    ("amazing", "horrible"),
    ("fresh", "stale"),
    ("tasty", "salty"),
    ("wonderful", "gloomy"),
    ("perfect", "mediocre"),
]
NOUNS = ["food", "service", "pasta", "pizza", "staff", "dessert", "wine", "steak",
         "soup", "atmosphere", "waiter", "salad"]
TEMPLATES = ["the {noun} was {adj}", "{adj} {noun}", "really {adj} {noun}"]
NEUTRAL = [
    "we came here on a friday night",
    "our table was near the window",
    "they have a small menu",
    "we ordered the special of the day",
    "the restaurant is downtown",
    "parking can take a while",
    "we went with two friends",
    "the menu changes every season",
    "it was our first visit",
    "reservations are recommended",
    "the dining room is on the second floor",
    "we sat at the bar",
]


def review_pair(rng, long):
    """A positive review and its negative twin."""
    if long:
        neutral = rng.sample(NEUTRAL, 5)
        chosen = rng.sample(range(len(ADJECTIVES)), 2)
        # Four phrases over two adjectives, so at least one repeats.
        main = chosen + [rng.choice(chosen) for _ in range(2)]
        others = [k for k in range(len(ADJECTIVES)) if k not in chosen]
        contrary = [rng.choice(others)] if rng.random() < 0.4 else []
    else:
        neutral = rng.sample(NEUTRAL, 1)
        main = [rng.randrange(len(ADJECTIVES))]
        contrary = []
    nouns = rng.sample(NOUNS, len(main) + len(contrary))
    slots = [("n", text, None) for text in neutral]
    for i, k in enumerate(main):
        slots.append(("m", k, (rng.choice(TEMPLATES), nouns[i])))
    for i, k in enumerate(contrary):
        slots.append(("o", k, (rng.choice(TEMPLATES), nouns[len(main) + i])))
    rng.shuffle(slots)

    def render(positive):
        parts = []
        for kind, item, phrase in slots:
            if kind == "n":
                parts.append(item)
                continue
            template, noun = phrase
            adj = ADJECTIVES[item][0 if (kind == "m") == positive else 1]
            parts.append(template.format(adj=adj, noun=noun))
        return ". ".join(p.capitalize() for p in parts) + "."

    return render(True), render(False)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=2022)
    parser.add_argument("--size", type=int, default=60)
    parser.add_argument("--neutral", type=int, default=8,
                        help="number of neutral-only reviews (labeled 0)")
    parser.add_argument("--output", default="data/synthetic_reviews.csv")
    args = parser.parse_args()

    rng = random.Random(args.seed)
    # Every neutral fragment is used the same number of times.
    fragments = []
    while len(fragments) < 3 * args.neutral:
        block = list(NEUTRAL)
        rng.shuffle(block)
        fragments += block
    neutral_rows = []
    for i in range(args.neutral):
        parts = fragments[3 * i:3 * i + 3]
        neutral_rows.append((". ".join(p.capitalize() for p in parts) + ".", 0))

    rows = []
    for i in range((args.size - args.neutral) // 2):
        positive, negative = review_pair(rng, long=i % 2 == 1)
        rows.append((positive, 1))
        rows.append((negative, 0))
    step = max(1, len(rows) // max(1, args.neutral))
    for i, row in enumerate(neutral_rows):
        rows.insert(min(len(rows), (i + 1) * step + i), row)

    with open(args.output, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["text", "label"])
        writer.writerows(rows)


if __name__ == "__main__":
    main()
