"""Operator command line: serve, replay, eval, validate, gen, observe.

All results are machine-readable JSON on stdout; diagnostics go to stderr.
Exit codes: 0 success, 1 usage, 2 validation/verification failure, 3 I/O.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources

from . import serialization as ser
from . import trajectory
from .errors import HouseSimError, MalformedFile, ValidationFailed
from .evaluation import manipulation_accuracy, navigation_error
from .model import House, validate_house
from .observation import observation_to_json, observe
from .scenario import generate_scenario, load_house
from .server import DEFAULT_BRIDGE_PORT, DEFAULT_PORT, SimServer

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(doc):
    print(ser.dumps(doc))


def _read_file(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)


def _write_file(path: str, data: bytes):
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)


def bundled_house_paths() -> list[str]:
    base = resources.files("housesim") / "data"
    return sorted(str(p) for p in base.iterdir() if p.name.endswith(".json"))


def _load_houses(paths) -> dict[str, House]:
    houses = {}
    for path in paths:
        house = load_house(_read_file(path))
        houses[house.house_id] = house
    return houses


def _house_path(arg: str) -> str:
    """A --house value: a file path, or the id of a bundled house."""
    if not os.path.exists(arg):
        for path in bundled_house_paths():
            if os.path.splitext(os.path.basename(path))[0] == arg:
                return path
    return arg


def _point(value: str):
    parts = value.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected x,z,room")
    return (parts[2], float(parts[0]), float(parts[1]))


def build_parser() -> _Parser:
    parser = _Parser(prog="housesim")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="host TCP + bridge sessions")
    p.add_argument("--house", action="append", default=[],
                   help="house file (repeatable; bundled houses if omitted)")
    p.add_argument("--port", type=int,
                   default=int(os.environ.get("HOUSESIM_PORT", DEFAULT_PORT)))
    p.add_argument("--bridge-port", type=int, default=DEFAULT_BRIDGE_PORT)
    p.add_argument("--host", default="127.0.0.1")

    p = sub.add_parser("replay", help="replay a trajectory file")
    p.add_argument("--traj", required=True)
    p.add_argument("--verify", action="store_true",
                   help="exit 0 iff stored states match re-application")

    p = sub.add_parser("eval", help="evaluation metrics")
    esub = p.add_subparsers(dest="metric", required=True)
    nav = esub.add_parser("nav")
    nav.add_argument("--house", required=True)
    nav.add_argument("--agent", type=_point, required=True, metavar="X,Z,ROOM")
    nav.add_argument("--goal", type=_point, required=True, metavar="X,Z,ROOM")
    manip = esub.add_parser("manip")
    manip.add_argument("--agent-traj", required=True)
    manip.add_argument("--ref-traj", required=True)

    p = sub.add_parser("validate", help="validate a house file")
    p.add_argument("--house", required=True)

    p = sub.add_parser("gen", help="generate a seeded scenario world")
    p.add_argument("--house", required=True)
    p.add_argument("--spec", required=True, help="JSON list of {type, count}")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("observe", help="dump an observation for a world file")
    p.add_argument("--world", required=True)
    p.add_argument("--out", default=None)
    return parser


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    try:
        return _run_command(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_IO
    except ValidationFailed as exc:
        _emit({"valid": False,
               "violations": [{"code": v.code, "location": v.location,
                               "message": v.message} for v in exc.report]})
        return EXIT_FAILED
    except HouseSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except json.JSONDecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


def _run_command(args) -> int:
    if args.command == "serve":
        paths = [_house_path(h) for h in args.house] or bundled_house_paths()
        server = SimServer(_load_houses(paths), host=args.host,
                           port=args.port, bridge_port=args.bridge_port)
        server.start()
        _emit({"port": server.port, "bridge_port": server.bridge_port,
               "houses": sorted(server.houses)})
        sys.stdout.flush()
        try:
            import threading
            threading.Event().wait()
        except KeyboardInterrupt:
            server.stop()
        return EXIT_OK

    if args.command == "replay":
        demo = trajectory.decode(_read_file(args.traj))
        if args.verify:
            ok = trajectory.verify(demo)
            _emit({"verified": ok, "steps": len(demo.steps),
                   "events": len(demo.events)})
            return EXIT_OK if ok else EXIT_FAILED
        world = demo.steps[-1][1] if demo.steps else demo.start
        _emit({"steps": len(demo.steps), "events": len(demo.events),
               "final_agent": ser.agent_to_json(world.agent)})
        return EXIT_OK

    if args.command == "eval":
        if args.metric == "nav":
            house = load_house(_read_file(_house_path(args.house)))
            meters = navigation_error(house, args.agent, args.goal)
            _emit({"navigation_error_m": meters})
            return EXIT_OK
        agent_demo = trajectory.decode(_read_file(args.agent_traj))
        ref_demo = trajectory.decode(_read_file(args.ref_traj))
        report = manipulation_accuracy(
            trajectory.extract_interactions(agent_demo),
            trajectory.extract_interactions(ref_demo))
        _emit({"precision": report.precision, "recall": report.recall,
               "f1": report.f1,
               "matched_pairs": [list(p) for p in report.matched_pairs]})
        return EXIT_OK

    if args.command == "validate":
        try:
            doc = json.loads(_read_file(_house_path(args.house)))
            house = ser.house_from_json(doc)
        except (json.JSONDecodeError, MalformedFile) as exc:
            _emit({"valid": False, "error": str(exc)})
            return EXIT_FAILED
        report = validate_house(house)
        _emit({"valid": not report,
               "violations": [{"code": v.code, "location": v.location,
                               "message": v.message} for v in report]})
        return EXIT_OK if not report else EXIT_FAILED

    if args.command == "gen":
        house = load_house(_read_file(_house_path(args.house)))
        spec_arg = args.spec.strip()
        if spec_arg.startswith(("{", "[")):
            spec_doc = json.loads(spec_arg)
        else:
            spec_doc = json.loads(_read_file(args.spec))
        if isinstance(spec_doc, dict):
            spec = [(str(k), int(v)) for k, v in spec_doc.items()]
        else:
            spec = [(str(s["type"]), int(s["count"])) for s in spec_doc]
        world = generate_scenario(house, spec, args.seed)
        _write_file(args.out, ser.dumps(ser.world_to_json(world)).encode("utf-8"))
        _emit({"objects": len(world.objects), "out": args.out})
        return EXIT_OK

    if args.command == "observe":
        world = ser.world_from_json(json.loads(_read_file(args.world)))
        from .config import DEFAULT_CONFIG
        doc = observation_to_json(observe(world, DEFAULT_CONFIG))
        data = ser.dumps(doc).encode("utf-8")
        if args.out:
            _write_file(args.out, data)
            _emit({"out": args.out})
        else:
            print(data.decode("utf-8"))
        return EXIT_OK
    return EXIT_USAGE


def main():
    try:
        code = run(sys.argv[1:])
        sys.stdout.flush()
    except BrokenPipeError:
        # downstream pager/head closed the pipe; not our error
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = EXIT_OK
    raise SystemExit(code)


if __name__ == "__main__":
    main()
