#!/usr/bin/env python3
"""Generate the bundled synthetic fixture: one fully scripted 90-minute
match between two 11-player sides (plus four bench players to exercise
substitutions), written as dataset-shaped CSV tables.

Everything is deterministic -- no RNG -- so the pipeline output over this
fixture is byte-stable and individual slices can be checked by hand.

Scripted beats:
  * slice 0, team 100: a tiny hand-checkable possession (players 102-104,
    111) whose technical scores are asserted exactly in the test suite;
  * player 111 (forward): steadily declining involvement, substituted 58';
  * player 107 goal assisted by 106 (tag 302) around minute 30;
  * player 204 (defender): yellow card (tag 1702) around minute 42;
  * player 211 (19-year-old forward): goal around minute 52;
  * player 112 (substitute forward): strong involvement after entry.

Usage: python3 scripts/make_fixture.py [output_dir]
"""
from __future__ import annotations

import csv
import json
import os
import sys

MATCH_ID = 500001
MATCH_DATE = "2018-06-20 18:00:00"
TEAM_A, TEAM_B = 100, 200

# player_id -> (birth date, role). Player 213 deliberately has no birth date.
PLAYERS = {
    101: ("1988-03-12", "Goalkeeper"), 102: ("1991-07-01", "Defender"),
    103: ("1993-04-18", "Defender"), 104: ("1990-11-30", "Defender"),
    105: ("1995-02-09", "Defender"), 106: ("1992-08-23", "Midfielder"),
    107: ("1994-01-05", "Midfielder"), 108: ("1989-10-14", "Midfielder"),
    109: ("1996-05-27", "Midfielder"), 110: ("1993-12-03", "Forward"),
    111: ("1997-06-16", "Forward"), 112: ("1995-09-21", "Forward"),
    113: ("1998-03-08", "Midfielder"),
    201: ("1987-05-19", "Goalkeeper"), 202: ("1992-02-11", "Defender"),
    203: ("1994-09-02", "Defender"), 204: ("1991-03-25", "Defender"),
    205: ("1989-12-17", "Defender"), 206: ("1993-06-08", "Midfielder"),
    207: ("1995-11-20", "Midfielder"), 208: ("1990-04-04", "Midfielder"),
    209: ("1984-01-28", "Midfielder"), 210: ("1992-10-10", "Forward"),
    211: ("1999-07-07", "Forward"), 212: ("1994-08-15", "Forward"),
    213: ("", "Defender"),
}

LINEUP_A = [101, 102, 103, 104, 105, 106, 107, 108, 109, 110, 111]
LINEUP_B = [201, 202, 203, 204, 205, 206, 207, 208, 209, 210, 211]

SUBSTITUTIONS = [
    # (team, minute, out, in)
    (TEAM_A, 58, 111, 112),
    (TEAM_A, 75, 106, 113),
    (TEAM_B, 70, 210, 212),
    (TEAM_B, 80, 205, 213),
]

TAG_NAMES = [
    (101, "Goal"), (302, "assist"), (701, "lost"), (703, "won"),
    (1401, "interception"), (1702, "yellow_card"),
    (1801, "accurate"), (1802, "not accurate"),
]

N_SLICES = 18  # full 90 minutes, no stoppage


def active_players(team: int, k: int) -> list[int]:
    lineup = list(LINEUP_A if team == TEAM_A else LINEUP_B)
    for sub_team, minute, out, inp in SUBSTITUTIONS:
        if sub_team != team:
            continue
        if minute * 60 < (k + 1) * 300:  # entered before the slice ends
            lineup.remove(out)
            lineup.append(inp)
    return lineup


# players whose involvement is fully scripted stay out of the generic chains
SCRIPTED = {111, 112}


def outfield(team: int, k: int) -> list[int]:
    gk = 101 if team == TEAM_A else 201
    return sorted(p for p in active_players(team, k) if p != gk and p not in SCRIPTED)


class EventSink:
    def __init__(self) -> None:
        self.rows: list[dict] = []
        self._next_id = 1

    def add(self, team: int, player: int, name: str, sub_name: str,
            tags: list[int], sec: float, period: str) -> None:
        self.rows.append({
            "id": self._next_id,
            "matchId": MATCH_ID,
            "teamId": team,
            "playerId": player,
            "eventName": name,
            "subEventName": sub_name,
            "tags": ";".join(str(t) for t in tags),
            "eventSec": f"{sec:.1f}",
            "matchPeriod": period,
        })
        self._next_id += 1


def emit_pass_chain(sink: EventSink, team: int, period: str, start: float,
                    chain: list[tuple[int, bool]]) -> float:
    """Chain of passes 6 s apart; True = accurate (edge to the next event)."""
    t = start
    for player, accurate in chain:
        sink.add(team, player, "Pass", "Simple pass",
                 [1801 if accurate else 1802], t, period)
        t += 6.0
    return t


def generic_chain(team: int, k: int, length: int = 6) -> list[tuple[int, bool]]:
    players = outfield(team, k)
    rotated = players[k % len(players):] + players[:k % len(players)]
    chain = []
    for i in range(length):
        player = rotated[i % len(rotated)]
        accurate = (k + i) % 4 != 3  # every fourth pass goes astray
        chain.append((player, accurate))
    # avoid consecutive duplicate passers (no self-edges in the graph)
    deduped = [chain[0]]
    for item in chain[1:]:
        if item[0] != deduped[-1][0]:
            deduped.append(item)
    return deduped


def forward_111_chain(k: int) -> list[tuple[int, bool]]:
    """Low-volume, declining involvement for the forward substituted at 58':
    one touch per slice at best, then misplaced passes, then nothing."""
    if k <= 3:
        return [(111, True)]
    if k <= 7:
        return [(111, False)]
    return []


def substitute_112_chain(k: int) -> list[tuple[int, bool]]:
    """Growing involvement for the substitute forward: quiet first slice,
    then one extra touch every other slice."""
    partners = [109, 110, 108, 105, 107, 104]
    touches = 1 + (k - 12) // 2
    chain = []
    for i in range(touches):
        chain.append((112, True))
        chain.append((partners[(k + i) % 6], True))
    return chain


def build_events() -> EventSink:
    sink = EventSink()
    for k in range(N_SLICES):
        period = "1H" if k <= 8 else "2H"
        base = (k % 9) * 300.0
        first, second = (TEAM_A, TEAM_B) if k % 2 == 0 else (TEAM_B, TEAM_A)
        windows = {first: base + 10.0, second: base + 160.0}

        for team in (first, second):
            t = windows[team]
            if team == TEAM_A:
                if k == 0:
                    # hand-checkable possession: exact weights in the tests.
                    # team volume = |+1|*2 + |+1|+|-1|+|+1| + |+1| + |+1.5| + 7*|+1| = 14.5
                    sink.add(TEAM_A, 102, "Pass", "Simple pass", [1801], 10.0, "1H")
                    sink.add(TEAM_A, 103, "Pass", "Simple pass", [1801], 16.0, "1H")
                    sink.add(TEAM_A, 102, "Pass", "Simple pass", [1801], 22.0, "1H")
                    sink.add(TEAM_A, 103, "Pass", "Simple pass", [1802], 28.0, "1H")
                    sink.add(TEAM_A, 111, "Pass", "Simple pass", [1801], 34.0, "1H")
                    sink.add(TEAM_A, 103, "Pass", "Simple pass", [1801], 40.0, "1H")
                    sink.add(TEAM_A, 104, "Shot", "Shot", [1801], 46.0, "1H")
                    for i, pid in enumerate((105, 106, 107, 108, 109, 110, 101)):
                        sink.add(TEAM_A, pid, "Pass", "Simple pass", [1801], 52.0 + 6 * i, "1H")
                    continue
                t = emit_pass_chain(sink, TEAM_A, period, t, generic_chain(TEAM_A, k))
                if k % 2 == 0 and 101 in active_players(TEAM_A, k):
                    sink.add(TEAM_A, 101, "Pass", "Launch", [1801], t, period)
                    t += 6.0
                    sink.add(TEAM_A, 105, "Pass", "Simple pass", [1801], t, period)
                    t += 6.0
                if 1 <= k <= 11:
                    chain_111 = forward_111_chain(k)
                    if chain_111:
                        t = emit_pass_chain(sink, TEAM_A, period, t, chain_111)
                if k >= 12:
                    t = emit_pass_chain(sink, TEAM_A, period, t, substitute_112_chain(k))
                if k % 3 == 2:
                    sink.add(TEAM_A, 110, "Shot", "Shot", [1801], t, period)
                    t += 6.0
                if k == 6:
                    # goal around the 30th minute, assisted by 106
                    sink.add(TEAM_A, 106, "Pass", "Smart pass", [1801, 302], base + 130.0, period)
                    sink.add(TEAM_A, 107, "Shot", "Goal", [101, 1801], base + 136.0, period)
                sink.add(TEAM_A, 106 if k < 15 else 113, "Duel", "Ground loose ball duel",
                         [701], t, period)
            else:
                if k == 0:
                    # balanced opening possession mirroring team A's volume
                    sink.add(TEAM_B, 202, "Pass", "Simple pass", [1801], 160.0, "1H")
                    sink.add(TEAM_B, 203, "Pass", "Simple pass", [1801], 166.0, "1H")
                    sink.add(TEAM_B, 202, "Pass", "Simple pass", [1801], 172.0, "1H")
                    sink.add(TEAM_B, 203, "Pass", "Simple pass", [1802], 178.0, "1H")
                    sink.add(TEAM_B, 211, "Pass", "Simple pass", [1801], 184.0, "1H")
                    sink.add(TEAM_B, 203, "Pass", "Simple pass", [1801], 190.0, "1H")
                    sink.add(TEAM_B, 204, "Shot", "Shot", [1801], 196.0, "1H")
                    for i, pid in enumerate((205, 206, 207, 208, 209, 210, 201)):
                        sink.add(TEAM_B, pid, "Pass", "Simple pass", [1801], 208.0 + 6 * i, "1H")
                    sink.add(TEAM_B, 207, "Duel", "Ground loose ball duel", [703], 256.0, "1H")
                    continue
                t = emit_pass_chain(sink, TEAM_B, period, t, generic_chain(TEAM_B, k, length=7))
                if k % 2 == 1 and 201 in active_players(TEAM_B, k):
                    sink.add(TEAM_B, 201, "Pass", "Launch", [1801], t, period)
                    t += 6.0
                    sink.add(TEAM_B, 202, "Pass", "Simple pass", [1801], t, period)
                    t += 6.0
                if k % 4 == 1:
                    sink.add(TEAM_B, 210 if k < 14 else 212, "Shot", "Shot", [1802], t, period)
                    t += 6.0
                if k == 8:
                    # defender booked around minute 42
                    sink.add(TEAM_B, 204, "Foul", "Foul", [1702], base + 145.0, period)
                if k == 10:
                    # young forward scores around minute 52
                    sink.add(TEAM_B, 208, "Pass", "Smart pass", [1801, 302], base + 275.0, period)
                    sink.add(TEAM_B, 211, "Shot", "Goal", [101, 1801], base + 281.0, period)
                sink.add(TEAM_B, 207, "Duel", "Ground loose ball duel", [703], t, period)

    # final whistle pins the nominal 90' end
    sink.add(TEAM_A, 101, "Pass", "Launch", [1801], 2699.0, "2H")
    sink.rows.sort(key=lambda r: (r["matchPeriod"], float(r["eventSec"]), r["id"]))
    return sink


def teams_data() -> dict:
    def side(team: int, lineup: list[int]) -> dict:
        subs = [
            {"playerIn": inp, "playerOut": out, "minute": minute}
            for sub_team, minute, out, inp in SUBSTITUTIONS
            if sub_team == team
        ]
        return {"formation": {"lineup": [{"playerId": p} for p in lineup],
                              "substitutions": subs}}

    return {str(TEAM_A): side(TEAM_A, LINEUP_A), str(TEAM_B): side(TEAM_B, LINEUP_B)}


def write_fixture(out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    sink = build_events()

    with open(os.path.join(out_dir, "events_synth.csv"), "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=[
            "id", "matchId", "teamId", "playerId", "eventName", "subEventName",
            "tags", "eventSec", "matchPeriod",
        ])
        writer.writeheader()
        writer.writerows(sink.rows)

    with open(os.path.join(out_dir, "matches_synth.csv"), "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=["wyId", "dateutc", "label", "teamsData"])
        writer.writeheader()
        writer.writerow({
            "wyId": MATCH_ID,
            "dateutc": MATCH_DATE,
            "label": "Alphas - Betas, 1 - 1",
            "teamsData": json.dumps(teams_data()),
        })

    with open(os.path.join(out_dir, "players.csv"), "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=["wyId", "birthDate", "role", "shortName"])
        writer.writeheader()
        for pid, (birth, role) in sorted(PLAYERS.items()):
            writer.writerow({
                "wyId": pid,
                "birthDate": birth,
                "role": json.dumps({"name": role}),
                "shortName": f"Player {pid}",
            })

    with open(os.path.join(out_dir, "tags2name.csv"), "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=["Tag", "Label"])
        writer.writeheader()
        for tag, label in TAG_NAMES:
            writer.writerow({"Tag": tag, "Label": label})

    print(f"fixture written to {out_dir} ({len(sink.rows)} events)")


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(__file__), "..", "fixtures", "synthetic")
    write_fixture(os.path.normpath(target))
