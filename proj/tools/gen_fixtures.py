#!/usr/bin/env python3
"""Regenerates the demo corpus, label files, and event timelines.

The output is committed; rerun only when the fixture design changes.
"""
import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "demo"

BLOCKS = [
    ["withdrawal", "withdrawals", "symptoms", "shaking", "sweats", "insomnia", "nausea"],
    ["suboxone", "methadone", "buprenorphine", "dose", "taper", "clinic"],
    ["meeting", "sponsor", "sobriety", "program", "steps", "milestone"],
    ["craving", "cravings", "urge", "trigger", "temptation", "willpower"],
    ["family", "job", "money", "court", "custody", "apartment"],
]

FILLER = ["the", "and", "i", "to", "a", "of", "was", "it", "my", "but",
          "for", "on", "at", "this", "that", "so", "just", "really",
          "been", "have", "im", "dont"]

EMOTION_POOLS = [
    ["happy", "grateful", "proud", "relief", "smile", "hope"],
    ["sad", "cry", "lonely", "miserable", "hopeless"],
    ["afraid", "scared", "panic", "worry", "terrified"],
    ["angry", "furious", "bitter", "rage"],
    ["pain", "broke", "jail", "overdose", "grief"],
    ["clean", "sober", "better", "healthy", "strong", "recovery"],
]

SUBREDDITS = ["OpiatesRecovery", "opiates", "addiction"]

N_AUTHORS = 60
N_OUD = 35          # u001..u035
N_RECOVERING = 12   # u001..u012
N_RELAPSED = 8      # u001..u008
POSTS_PER_AUTHOR = 3
BASE_TS = 1500000000
DAY = 86400


def author_name(i):
    return f"u{i:03d}"


def make_post_text(rng, block, emotions, is_oud, is_recovering):
    words = []
    words += rng.choices(FILLER, k=rng.randint(6, 10))
    words += rng.choices(block, k=rng.randint(5, 8))
    words += rng.choices(emotions, k=rng.randint(2, 4))
    if is_oud and rng.random() < 0.9:
        words.append("dope")
    if is_recovering and rng.random() < 0.85:
        words.append("detox")
    rng.shuffle(words)
    # fixed phrases keep a few bigrams above any reasonable count floor
    if rng.random() < 0.5:
        words += ["days", "clean"]
    if block is BLOCKS[0] and rng.random() < 0.6:
        words += ["withdrawal", "symptoms"]
    if block is BLOCKS[1] and rng.random() < 0.7:
        words += ["suboxone", "dose"]
    return " ".join(words)


def main():
    rng = random.Random(20240814)
    OUT.mkdir(exist_ok=True)

    posts = []
    events = []
    for i in range(1, N_AUTHORS + 1):
        name = author_name(i)
        is_oud = i <= N_OUD
        is_recovering = i <= N_RECOVERING
        block = BLOCKS[i % len(BLOCKS)]
        emotions = EMOTION_POOLS[i % len(EMOTION_POOLS)]
        timestamps = []
        for j in range(POSTS_PER_AUTHOR):
            ts = BASE_TS + i * 50000 + j * 3 * DAY
            timestamps.append(ts)
            post = {
                "id": f"t{1 if j else 3}_{i:03d}{j}",
                "author": name,
                "subreddit": SUBREDDITS[(i + j) % len(SUBREDDITS)],
                "created_utc": ts,
            }
            if j == 0:
                post["title"] = " ".join(rng.choices(block, k=3))
            else:
                post["parent_id"] = f"t3_{i:03d}0"
            post["body"] = make_post_text(rng, block, emotions, is_oud, is_recovering)
            posts.append(post)
        if is_recovering:
            latest = max(timestamps)
            for ts in timestamps:
                events.append((name, ts, "post"))
            events.append((name, latest - 120 * DAY, "recovery_signal"))
            if i <= N_RELAPSED:
                events.append((name, latest - 20 * DAY, "opioid_use_signal"))
            elif i < N_RECOVERING:
                events.append((name, latest - 200 * DAY, "opioid_use_signal"))
            # the last recovering author has no use signal at all

    with open(OUT / "corpus.jsonl", "w") as f:
        for post in posts:
            ordered = {k: post[k] for k in
                       ["id", "author", "subreddit", "created_utc",
                        "parent_id", "title", "body"] if k in post}
            f.write(json.dumps(ordered) + "\n")

    with open(OUT / "labels_oud.csv", "w") as f:
        f.write("author,label\n")
        for i in range(1, N_AUTHORS + 1):
            label = "oud" if i <= N_OUD else "non_oud"
            f.write(f"{author_name(i)},{label}\n")

    with open(OUT / "labels_recovering.csv", "w") as f:
        f.write("author,label\n")
        for i in range(1, N_OUD + 1):
            label = "recovering" if i <= N_RECOVERING else "non_recovering"
            f.write(f"{author_name(i)},{label}\n")

    with open(OUT / "events.csv", "w") as f:
        f.write("author,timestamp,kind\n")
        for name, ts, kind in events:
            f.write(f"{name},{ts},{kind}\n")

    print(f"{len(posts)} posts, {len(events)} events")


if __name__ == "__main__":
    main()
