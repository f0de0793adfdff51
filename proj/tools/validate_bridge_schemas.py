#!/usr/bin/env python3
"""Sends a corpus of requests through `mpst bridge` and validates every
request and response against the JSON schemas in schemas/."""

import argparse
import json
import subprocess
import sys
from pathlib import Path

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

SESSIONS = {
    "workers": "controller->worker_A:Work ; controller->worker_B:Work ; "
    "(worker_A->controller:Done || worker_B->controller:Done)",
    "recursive": "rec X . c->w:{Work ; w->c:Done ; X, Quit}",
    "parallel": "pA->pB:TaskA || pA->pB:TaskB",
    "branching": "(pA->pB:TaskA ; pB->pC:TaskA) + (pA->pB:TaskB ; pB->pC:TaskB)",
    "kleene": "(c->w:Work ; w->c:Done)*",
    "ambiguous": "(a->b:m ; b->c:mP)* ; c->d:mPP",
    "self": "a->a:m",
    "broken": "c->w:Work ;\n  c->",
}
PRESETS = ["VeryGentleIntroMPST", "GentleIntroMPAsyncST", "APIGenInScala3", "ST4MP", "UnorderedChoreo"]


def corpus():
    reqs = [{"op": "examples"}, {"op": "presets"}]
    for name, text in SESSIONS.items():
        for op in ["parse", "msc"]:
            reqs.append({"op": op, "session": text})
        for preset in PRESETS:
            for op in ["check", "project", "localsFsm", "lts", "enabled"]:
                reqs.append({"op": op, "session": text, "configA": preset})
        reqs.append({"op": "bisim", "session": text, "configA": "APIGenInScala3", "configB": "UnorderedChoreo"})
        reqs.append({"op": "bisim", "session": text, "configA": "GentleIntroMPAsyncST", "configB": "ST4MP"})
    reqs.append({"op": "lts", "session": SESSIONS["recursive"],
                 "configA": {"preset": "ST4MP", "explorationMaxStates": 2}})
    reqs.append({"op": "step", "session": SESSIONS["parallel"], "label": "zz?nope"})
    reqs.append({"op": "check", "session": SESSIONS["kleene"],
                 "configA": {"preset": "VeryGentleIntroMPST", "allowKleeneStar": True}})
    return reqs


def run_bridge(binary, requests):
    lines = "".join(json.dumps(r) + "\n" for r in requests) + "{not json\n"
    out = subprocess.run([binary, "bridge"], input=lines, capture_output=True, text=True, check=True).stdout
    return [json.loads(line) for line in out.splitlines()]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("binary")
    ap.add_argument("schemas", type=Path)
    args = ap.parse_args()

    docs = {p.name: json.loads(p.read_text()) for p in args.schemas.glob("*.schema.json")}
    registry = Registry().with_resources(
        [(doc["$id"], Resource.from_contents(doc)) for doc in docs.values()]
    )
    request_v = Draft202012Validator(docs["request.schema.json"], registry=registry)
    response = docs["response.schema.json"]
    response_v = Draft202012Validator(response, registry=registry)

    def payload_validator(name):
        return Draft202012Validator({"$ref": response["$id"] + "#/$defs/" + name}, registry=registry)

    errors = []
    checked = 0

    def validate(req, resp):
        nonlocal checked
        checked += 1
        where = json.dumps(req)[:120]
        if req is not None:
            errors.extend(f"request {where}: {e.message}" for e in request_v.iter_errors(req))
        errors.extend(f"response to {where}: {e.message}" for e in response_v.iter_errors(resp))
        if resp.get("ok"):
            sub = payload_validator(req["op"] + "Payload")
            errors.extend(f"payload of {where}: {e.message}" for e in sub.iter_errors(resp["payload"]))
        elif "payload" in resp:
            sub = payload_validator("errorPayload")
            errors.extend(f"error payload of {where}: {e.message}" for e in sub.iter_errors(resp["payload"]))

    reqs = corpus()
    resps = run_bridge(args.binary, reqs)
    if len(resps) != len(reqs) + 1:
        print(f"expected {len(reqs) + 1} responses, got {len(resps)}")
        return 1
    for req, resp in zip(reqs, resps):
        validate(req, resp)
    validate(None, resps[-1])
    if resps[-1].get("error", {}).get("kind") != "MalformedRequest":
        errors.append("malformed line did not give MalformedRequest")

    # Walk a few steps from every enabled response, feeding states back in.
    frontier = [(q, r) for q, r in zip(reqs, resps) if q["op"] == "enabled" and r["ok"]]
    for _ in range(3):
        steps = []
        for q, r in frontier:
            for succ in r["payload"]["successors"][:2]:
                steps.append({"op": "step", "session": q["session"], "configA": q["configA"],
                              "state": r["payload"]["state"], "label": succ["label"]})
        if not steps:
            break
        stepped = run_bridge(args.binary, steps)[:-1]
        follow = []
        for q, r in zip(steps, stepped):
            validate(q, r)
            if r["ok"]:
                follow.append({"op": "enabled", "session": q["session"], "configA": q["configA"],
                               "state": r["payload"]["state"]})
        enabled = run_bridge(args.binary, follow)[:-1]
        for q, r in zip(follow, enabled):
            validate(q, r)
        frontier = [(q, r) for q, r in zip(follow, enabled) if r["ok"]]

    for e in errors[:40]:
        print(e)
    print(f"{checked} request/response pairs checked, {len(errors)} schema errors")
    return 1 if errors else 0


if __name__ == "__main__":
    sys.exit(main())
