#!/usr/bin/env python3
"""Generate the synthetic point-by-point fixtures under fixtures/.

Matches follow real tennis scoring (deuce/advantage games, 7-point
tiebreaks at 6-6, best of three or five sets). Columns use the official
point-by-point layout. Output is deterministic.

    python3 scripts/simulate_matches.py
"""

import csv
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "fixtures"

HEADER = [
    "match_id", "player1", "player2", "elapsed_time", "set_no", "game_no", "point_no",
    "p1_sets", "p2_sets", "p1_games", "p2_games", "p1_score", "p2_score",
    "server", "serve_no", "point_victor", "p1_points_won", "p2_points_won",
    "game_victor", "set_victor", "p1_ace", "p2_ace", "p1_winner", "p2_winner",
    "winner_shot_type", "p1_double_fault", "p2_double_fault", "p1_unf_err", "p2_unf_err",
    "p1_net_pt", "p2_net_pt", "p1_net_pt_won", "p2_net_pt_won",
    "p1_break_pt", "p2_break_pt", "p1_break_pt_won", "p2_break_pt_won",
    "p1_break_pt_missed", "p2_break_pt_missed", "p1_distance_run", "p2_distance_run",
    "rally_count", "speed_mph", "serve_width", "serve_depth", "return_depth",
]

CALL = ["0", "15", "30", "40"]


def game_score(pts, opp):
    """Display score of a regular game before the point."""
    if pts >= 3 and opp >= 3:
        if pts == opp:
            return "40"
        return "AD" if pts > opp else "40"
    return CALL[min(pts, 3)]


def simulate(match_id, names, seed, p_serve=(0.66, 0.64), best_of=3, momentum=0.0):
    rng = random.Random(seed)
    rows = []
    sets = [0, 0]
    set_no = 1
    server = 1 if rng.random() < 0.5 else 2
    points_won = [0, 0]
    point_no = 0
    elapsed = 0
    streak = (0, 0)
    while max(sets) * 2 <= best_of:
        games = [0, 0]
        game_no = 0
        while True:
            game_no += 1
            tiebreak = games == [6, 6]
            pts = [0, 0]
            tb_first = server
            tb_count = 0
            while True:
                point_no += 1
                p = server - 1
                r = 1 - p
                if tiebreak:
                    s1, s2 = str(pts[0]), str(pts[1])
                else:
                    s1, s2 = game_score(pts[0], pts[1]), game_score(pts[1], pts[0])
                # break point: receiver wins the game with this point
                bp = [0, 0]
                if not tiebreak and pts[r] >= 3 and pts[r] > pts[p]:
                    bp[r] = 1
                prob = p_serve[p]
                holder, k = streak
                if momentum and k >= 2:
                    prob += momentum if holder == server else -momentum
                second = rng.random() < 0.37
                serve_no = 2 if second else 1
                df = second and rng.random() < 0.08
                if df:
                    victor = 3 - server
                else:
                    victor = server if rng.random() < prob else 3 - server
                v = victor - 1
                loser = 1 - v
                ace = (not df) and victor == server and rng.random() < 0.12
                rally = 0 if (ace or df) else max(1, int(rng.expovariate(1 / 4.0)))
                winner = (not ace and not df) and rng.random() < 0.35
                unf = (not ace and not df and not winner) and rng.random() < 0.55
                net = [0, 0]
                net_won = [0, 0]
                if rally >= 3 and rng.random() < 0.15:
                    who = rng.choice([0, 1])
                    net[who] = 1
                    net_won[who] = int(who == v)
                shot = rng.choice(["F", "B"]) if winner else "0"
                dist = [0.0, 0.0]
                for i in (0, 1):
                    dist[i] = round(rally * rng.uniform(3.0, 9.0), 3)
                speed = "" if df else str(int(rng.gauss(115 if serve_no == 1 else 95, 8)))
                points_won[v] += 1
                pts[v] += 1
                elapsed += rng.randint(20, 70)

                bp_won = [0, 0]
                bp_missed = [0, 0]
                if bp[r]:
                    if victor - 1 == r:
                        bp_won[r] = 1
                    else:
                        bp_missed[r] = 1

                if tiebreak:
                    done = max(pts) >= 7 and abs(pts[0] - pts[1]) >= 2
                else:
                    done = max(pts) >= 4 and abs(pts[0] - pts[1]) >= 2
                game_victor = victor if done else 0
                set_victor = 0
                if done:
                    games_after = games[:]
                    games_after[v] += 1
                    g_hi, g_lo = max(games_after), min(games_after)
                    if (g_hi >= 6 and g_hi - g_lo >= 2) or g_hi == 7:
                        set_victor = victor

                rows.append({
                    "match_id": match_id, "player1": names[0], "player2": names[1],
                    "elapsed_time": "%02d:%02d:%02d" % (elapsed // 3600, elapsed // 60 % 60, elapsed % 60),
                    "set_no": set_no, "game_no": game_no, "point_no": point_no,
                    "p1_sets": sets[0], "p2_sets": sets[1], "p1_games": games[0], "p2_games": games[1],
                    "p1_score": s1, "p2_score": s2, "server": server, "serve_no": serve_no,
                    "point_victor": victor, "p1_points_won": points_won[0], "p2_points_won": points_won[1],
                    "game_victor": game_victor, "set_victor": set_victor,
                    "p1_ace": int(ace and server == 1), "p2_ace": int(ace and server == 2),
                    "p1_winner": int(winner and v == 0), "p2_winner": int(winner and v == 1),
                    "winner_shot_type": shot,
                    "p1_double_fault": int(df and server == 1), "p2_double_fault": int(df and server == 2),
                    "p1_unf_err": int(unf and loser == 0), "p2_unf_err": int(unf and loser == 1),
                    "p1_net_pt": net[0], "p2_net_pt": net[1],
                    "p1_net_pt_won": net_won[0], "p2_net_pt_won": net_won[1],
                    "p1_break_pt": bp[0], "p2_break_pt": bp[1],
                    "p1_break_pt_won": bp_won[0], "p2_break_pt_won": bp_won[1],
                    "p1_break_pt_missed": bp_missed[0], "p2_break_pt_missed": bp_missed[1],
                    "p1_distance_run": dist[0], "p2_distance_run": dist[1],
                    "rally_count": rally, "speed_mph": speed,
                    "serve_width": rng.choice(["B", "BC", "BW", "C", "W"]),
                    "serve_depth": rng.choice(["CTL", "NCTL"]),
                    "return_depth": rng.choice(["D", "ND", ""]),
                })
                holder, k = streak
                streak = (victor, k + 1) if holder == victor else (victor, 1)

                if tiebreak:
                    tb_count += 1
                    # serve changes after the first point, then every two
                    if tb_count % 2 == 1:
                        server = 3 - server
                if done:
                    break
            games[v] += 1
            if not tiebreak:
                server = 3 - server
            else:
                server = 3 - tb_first
            if set_victor:
                sets[v] += 1
                set_no += 1
                break
    return rows


def write(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=HEADER, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def sample_30():
    """First 30 points of a match containing exactly one AD token, with one
    speed value blanked."""
    for seed in range(1000):
        rows = simulate("2023-wimbledon-1101", ("Ana Ace", "Bea Baseline"), seed)[:30]
        ads = sum(r["p1_score"] == "AD" for r in rows) + sum(r["p2_score"] == "AD" for r in rows)
        blanks = sum(r["speed_mph"] == "" for r in rows)
        if ads == 1 and blanks == 0:
            rows[7]["speed_mph"] = ""
            return rows
    raise SystemExit("no suitable seed")


def main():
    OUT.mkdir(exist_ok=True)
    write(OUT / "sample_30.csv", sample_30())
    corpus = simulate("2023-wimbledon-1301", ("Cleo Clay", "Dina Drop"), 1301, best_of=3)
    corpus += simulate("2023-wimbledon-1701", ("Eva Edge", "Fay Flat"), 1701, best_of=5, momentum=0.08)
    write(OUT / "toy_corpus.csv", corpus)


if __name__ == "__main__":
    main()
