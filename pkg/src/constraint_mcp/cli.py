"""Command line: ``serve`` runs the MCP server on stdio, ``client`` runs the
one-shot agent plus reviewer against a server."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .backends import ALIASES, MODES, canonical_mode, make_backend

EPILOG = "Mode aliases: " + ", ".join(f"{old} -> {new}" for old, new in ALIASES.items()) + "."


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _positive(v: str) -> float:
    x = float(v)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return x


def _nonneg_int(v: str) -> int:
    x = int(v)
    if x < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return x


def _common(p):
    p.add_argument("--mode", action="append", choices=[*MODES, *ALIASES], required=True,
                   help="backend for this session (give exactly once)")
    p.add_argument("--max-timeout", type=_positive, default=30.0, help="cap on solve_model timeouts, seconds")
    p.add_argument("--mzn-exe", help="MiniZinc executable (else $MCP_SOLVER_MZN, else PATH)")
    p.add_argument("--smt-exe", help="SMT-LIB2 solver executable (else $MCP_SOLVER_SMT, else PATH)")
    p.add_argument("-v", "--verbose", action="store_true", help="log to stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="constraint-mcp", description=__doc__, epilog=EPILOG)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    serve = sub.add_parser("serve", help="run the MCP server on stdin/stdout", epilog=EPILOG)
    _common(serve)
    client = sub.add_parser("client", help="one-shot agent run with review", epilog=EPILOG)
    _common(client)
    client.add_argument("--problem", required=True, help="problem statement file")
    src = client.add_mutually_exclusive_group(required=True)
    src.add_argument("--script", help="scripted connector transcript (JSON list of steps)")
    src.add_argument("--live", action="store_true", help="use the live LLM connector (MCP_CLIENT_LLM_* env)")
    client.add_argument("--step-limit", type=int, default=50, help="maximum agent steps (LLM turns)")
    client.add_argument("--retries", type=_nonneg_int, default=0, help="re-runs after an incorrect verdict")
    client.add_argument("--json", action="store_true", help="print only the JSON report")
    client.add_argument("--spawn", action="store_true",
                        help="run the server as a stdio subprocess instead of in-process")
    return parser


def _mode_of(args) -> str:
    if len(args.mode) != 1:
        raise UsageError(f"--mode must be given exactly once (got {len(args.mode)})")
    return canonical_mode(args.mode[0])


def _serve(args, mode: str) -> int:
    from .server import ServerConfig, SessionState, serve

    backend = make_backend(mode, args.mzn_exe, args.smt_exe)
    session = SessionState(mode, backend, ServerConfig(max_timeout_s=args.max_timeout))
    return serve(session)


def _client(args, mode: str) -> int:
    from .client import run_client
    from .client.agent import transcript_summary
    from .client.connectors import ConnectorError, LiveConnector, scripted_pair
    from .client.handles import InProcessServer, StdioServer
    from .server import ServerConfig

    if args.step_limit < 1:
        raise UsageError("--step-limit must be at least 1")
    try:
        with open(args.problem) as fh:
            problem = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read problem file: {exc}") from None
    try:
        if args.script:
            agent, reviewer = scripted_pair(args.script)
        else:
            agent = reviewer = LiveConnector()
    except (OSError, ValueError, ConnectorError) as exc:
        raise UsageError(str(exc)) from None

    if args.spawn:
        extra = ["--max-timeout", str(args.max_timeout)]
        for flag, val in (("--mzn-exe", args.mzn_exe), ("--smt-exe", args.smt_exe)):
            if val:
                extra += [flag, val]
        server = StdioServer(mode, extra)
    else:
        server = InProcessServer(mode, make_backend(mode, args.mzn_exe, args.smt_exe),
                                 ServerConfig(max_timeout_s=args.max_timeout))
    with server:
        server.initialize()
        report = run_client(problem, agent, reviewer, server, args.step_limit, args.retries)

    out = report.to_dict()
    if args.json:
        print(json.dumps(out, indent=1))
    else:
        print(transcript_summary(report.transcript))
        sol = report.solution
        print()
        print("solution:", json.dumps(sol) if sol is not None else "none")
        if sol and sol.get("objective") is not None:
            print(f"objective: {sol['objective']}")
        print(f"verdict: {report.verdict.verdict.upper()}: {report.verdict.explanation}")
        print("stats:", report.stats.short())
        print()
        print(json.dumps(out))
    return 1 if report.verdict.verdict == "incorrect" else 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        mode = _mode_of(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "serve":
            return _serve(args, mode)
        return _client(args, mode)
    except UsageError as exc:
        print(f"constraint-mcp: error: {exc}", file=sys.stderr)
        return 2
