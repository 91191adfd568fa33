"""Command-line entry point binding workspaces, validation, queries, codegen,
and the HTTP server for scripted and CI use.

Exit status contract: 0 success, 1 domain failure (violations found, failed
generation entry, conflict, integrity error), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .codegen import format_report_table, load_genplan, run_genplan
from .errors import OmniGraphError
from .graph import deserialize, serialize
from .metamodel import LightParams, MetaModel, dump_metamodel, light_create, validate
from .mutate import execute, parse_script, run_batch
from .query import query as evaluate_query

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="omnigraph",
        description="Typed graph workspaces: validation, queries, scripted mutation, "
        "template code generation, and a workspace server.",
    )
    parser.add_argument("--version", action="version", version=f"omnigraph {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("validate", help="check a workspace against a metamodel")
    p.add_argument("file", help="workspace file (.hgw.json)")
    p.add_argument("--mm", help="metamodel name or file (default: the workspace's own)")
    p.add_argument("--root", help="store root for metamodel lookup")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("stats", help="print node/link counts and the id high-water mark")
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("query", help="run a query pipeline and print matching ids")
    p.add_argument("file")
    p.add_argument("--q", required=True, help="query pipeline, e.g. 'node[type=Rule]'")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("exec", help="apply a mutation script to one workspace file")
    p.add_argument("file")
    p.add_argument("--script", required=True, help="script file, one statement per line")

    p = sub.add_parser("batch", help="apply a mutation script to many workspace files")
    p.add_argument("files", nargs="*")
    p.add_argument("--script", required=True)

    p = sub.add_parser("generate", help="run a workspace's generation plan")
    p.add_argument("file", help="source workspace file")
    p.add_argument("--plan", help="workspace id holding the plan (default: the source itself)")
    p.add_argument("--root", help="directory for plan lookup and template resolution "
                   "(default: the source file's directory)")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("serve", help="serve a store root over HTTP")
    p.add_argument("--root", help="store root (falls back to HGOS_ROOT, then '.')")
    p.add_argument("--port", type=int, default=8400)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui-dir", help="directory of built web UI assets to mount at /ui/")

    p = sub.add_parser("new-dsl", help="scaffold a metamodel from flags (light process)")
    p.add_argument("--id", required=True)
    p.add_argument("--name")
    p.add_argument(
        "--node",
        action="append",
        default=[],
        metavar="TYPE[:attr=kind,...]",
        help="node type, e.g. 'Task:title=string,done=bool' (repeatable)",
    )
    p.add_argument(
        "--link",
        action="append",
        default=[],
        metavar="TYPE:From->To[,From->To...]",
        help="link type with endpoint patterns (repeatable)",
    )
    return parser


def _load_workspace(path: str):
    return deserialize(Path(path).read_text(encoding="utf-8"))


def _resolve_metamodel(name: str | None, ws, root: str | None) -> MetaModel:
    from .bundled import bundled_metamodel
    from .metamodel import load_metamodel

    name = name or ws.metamodel
    candidate = Path(name)
    if candidate.is_file():
        return load_metamodel(candidate.read_text(encoding="utf-8"))
    if root:
        path = Path(root) / "metamodels" / f"{name}.mm.yaml"
        if path.is_file():
            return load_metamodel(path.read_text(encoding="utf-8"))
    return bundled_metamodel(name)


def _cmd_validate(args) -> int:
    ws = _load_workspace(args.file)
    mm = _resolve_metamodel(args.mm, ws, args.root)
    violations = validate(ws, mm)
    if args.format == "json":
        print(json.dumps(
            [{"element": v.element, "code": v.code, "message": v.message} for v in violations]
        ))
    else:
        for v in violations:
            print(f"{v.element} {v.code} {v.message}")
    return EXIT_DOMAIN if violations else EXIT_OK


def _cmd_stats(args) -> int:
    ws = _load_workspace(args.file)
    if args.format == "json":
        print(json.dumps({
            "id": ws.id,
            "nodes": ws.node_count(),
            "links": ws.link_count(),
            "max_id": ws.max_id(),
            "version": ws.version,
        }))
    else:
        print(f"nodes {ws.node_count()}  links {ws.link_count()}")
        print(f"max id {ws.max_id()}")
    return EXIT_OK


def _cmd_query(args) -> int:
    ws = _load_workspace(args.file)
    selection = evaluate_query(ws, args.q)
    if args.format == "json":
        print(json.dumps({"kind": selection.kind, "ids": list(selection.ids)}))
    else:
        for element_id in selection.ids:
            print(element_id)
    return EXIT_OK


def _cmd_exec(args) -> int:
    ws = _load_workspace(args.file)
    statements = parse_script(Path(args.script).read_text(encoding="utf-8"))
    report = execute(ws, statements)
    for line in report.outcomes:
        print(line)
    if not report.ok:
        print(f"error: {report.error}", file=sys.stderr)
        return EXIT_DOMAIN
    ws.version += 1
    path = Path(args.file)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(serialize(ws), encoding="utf-8")
    tmp.replace(path)
    print(f"saved {path} at version {ws.version}")
    return EXIT_OK


def _cmd_batch(args) -> int:
    statements = parse_script(Path(args.script).read_text(encoding="utf-8"))
    report = run_batch(args.files, statements)
    for entry in report.entries:
        if entry.ok:
            print(f"{entry.path}: saved at version {entry.new_version}")
        else:
            print(f"{entry.path}: FAILED: {entry.error}")
    return EXIT_OK if report.ok else EXIT_DOMAIN


def _cmd_generate(args) -> int:
    source_path = Path(args.file)
    source_ws = _load_workspace(args.file)
    base_dir = Path(args.root) if args.root else source_path.parent
    if args.plan:
        plan_path = base_dir / f"{args.plan}.hgw.json"
        plan_ws = deserialize(plan_path.read_text(encoding="utf-8"))
    else:
        plan_ws = source_ws
    try:
        mm = _resolve_metamodel(None, source_ws, args.root)
    except OmniGraphError:
        mm = None
    plan = load_genplan(plan_ws)
    report = run_genplan(plan, source_ws, mm, args.out, template_dir=base_dir)
    print(format_report_table(report))
    return EXIT_OK if report.ok else EXIT_DOMAIN


def _cmd_serve(args) -> int:
    import os

    from .server import serve

    root = args.root or os.environ.get("HGOS_ROOT") or "."
    serve(root, port=args.port, host=args.host, ui_dir=args.ui_dir)
    return EXIT_OK


def _parse_node_flag(raw: str):
    head, _, attrs_part = raw.partition(":")
    if not head:
        raise OmniGraphError(f"--node needs a type name, got {raw!r}")
    attrs = []
    if attrs_part:
        for item in attrs_part.split(","):
            key, sep, kind = item.partition("=")
            if not sep:
                raise OmniGraphError(f"--node attr must be name=kind, got {item!r}")
            attrs.append((key.strip(), kind.strip()))
    return head.strip(), tuple(attrs)


def _parse_link_flag(raw: str):
    head, sep, patterns_part = raw.partition(":")
    if not sep or not patterns_part:
        raise OmniGraphError(f"--link needs TYPE:From->To, got {raw!r}")
    patterns = tuple(p.strip() for p in patterns_part.split(","))
    return head.strip(), patterns


def _cmd_new_dsl(args) -> int:
    params = LightParams(
        id=args.id,
        name=args.name or args.id,
        node_types=tuple(_parse_node_flag(raw) for raw in args.node),
        link_types=tuple(_parse_link_flag(raw) for raw in args.link),
    )
    mm = light_create(params)
    sys.stdout.write(dump_metamodel(mm))
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "stats": _cmd_stats,
    "query": _cmd_query,
    "exec": _cmd_exec,
    "batch": _cmd_batch,
    "generate": _cmd_generate,
    "serve": _cmd_serve,
    "new-dsl": _cmd_new_dsl,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.subcommand](args)
    except OmniGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
