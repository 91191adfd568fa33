"""Generation plans: workspace-resident wiring of queries, templates, outputs.

A plan lives in a workspace as GenEntry nodes (template, output, root_query,
marker attributes). Running a plan renders every entry against a source
workspace and writes output files atomically; one failing entry does not
abort the others.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .bundled import bundled_metamodel, bundled_templates_dir
from .errors import OmniGraphError
from .graph import Workspace
from .metamodel import MetaModel, validate
from .query import QueryExpr, parse_query, run_query
from .template import parse_template, render

REPORT_FILENAME = "genreport.json"


@dataclass(frozen=True)
class GenEntry:
    template_path: str
    output_path: str
    root_query: QueryExpr
    comment_marker: str = "//"
    node_id: int = 0


@dataclass(frozen=True)
class GenPlan:
    entries: tuple


@dataclass
class GenResult:
    output_path: str
    ok: bool
    line_count: int = 0
    bytes_written: int = 0
    error: str | None = None


@dataclass
class GenReport:
    entries: list = field(default_factory=list)
    elapsed_ms: int = 0

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def to_doc(self) -> dict:
        return {
            "entries": [
                {
                    "output_path": e.output_path,
                    "ok": e.ok,
                    "line_count": e.line_count,
                    "bytes": e.bytes_written,
                    "error": e.error,
                }
                for e in self.entries
            ],
            "elapsed_ms": self.elapsed_ms,
        }


def _check_relative(path: str, what: str) -> None:
    if Path(path).is_absolute() or path.startswith("\\"):
        raise OmniGraphError(f"{what} must be a relative path, got {path!r}")
    if ".." in Path(path).parts:
        raise OmniGraphError(f"{what} must not escape upward, got {path!r}")


def load_genplan(ws: Workspace) -> GenPlan:
    """Collect GenEntry nodes into a plan, ascending node id.

    The entries are checked against the bundled codegen metamodel first;
    any violation on a GenEntry node refuses the whole load.
    """
    codegen_mm = bundled_metamodel("codegen")
    entry_ids = sorted(n.id for n in ws.nodes.values() if n.type_name == "GenEntry")
    entry_set = set(entry_ids)
    problems = [
        v for v in validate(ws, codegen_mm) if v.element in entry_set
    ]
    if problems:
        lines = "; ".join(f"{v.element} {v.code} {v.message}" for v in problems)
        raise OmniGraphError(f"generation plan is invalid: {lines}")
    entries = []
    seen_outputs = set()
    for node_id in entry_ids:
        node = ws.nodes[node_id]
        output = node.attrs["output"]
        template = node.attrs["template"]
        _check_relative(output, f"GenEntry {node_id} output path")
        _check_relative(template, f"GenEntry {node_id} template path")
        if output in seen_outputs:
            raise OmniGraphError(f"duplicate output path {output!r} in generation plan")
        seen_outputs.add(output)
        entries.append(
            GenEntry(
                template_path=template,
                output_path=output,
                root_query=parse_query(node.attrs["root_query"]),
                comment_marker=node.attrs.get("marker", "//"),
                node_id=node_id,
            )
        )
    return GenPlan(tuple(entries))


def run_genplan(
    plan: GenPlan,
    source_ws: Workspace,
    mm: MetaModel | None,
    out_dir,
    template_dir=None,
    write_report: bool = True,
) -> GenReport:
    """Render every plan entry and write its output atomically.

    Template paths resolve against template_dir (bundled templates are the
    fallback). Re-running with unchanged inputs is byte-identical.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    search_dirs = []
    if template_dir is not None:
        search_dirs.append(Path(template_dir))
    search_dirs.append(bundled_templates_dir())
    report = GenReport()
    started = time.perf_counter()
    for entry in plan.entries:
        result = GenResult(entry.output_path, ok=False)
        report.entries.append(result)
        template_file = next(
            (d / entry.template_path for d in search_dirs if (d / entry.template_path).is_file()),
            None,
        )
        if template_file is None:
            result.error = f"template {entry.template_path!r} not found"
            continue
        try:
            text = template_file.read_text(encoding="utf-8")
            tpl = parse_template(text, entry.comment_marker, str(template_file))
            root = run_query(source_ws, entry.root_query)
            rendered = render(tpl, source_ws, mm, root=root)
        except (OmniGraphError, OSError) as exc:
            result.error = str(exc)
            continue
        target = out_dir / entry.output_path
        target.parent.mkdir(parents=True, exist_ok=True)
        data = rendered.encode("utf-8")
        tmp = target.with_name(target.name + ".tmp")
        try:
            tmp.write_bytes(data)
            tmp.replace(target)
        except OSError as exc:
            result.error = str(exc)
            tmp.unlink(missing_ok=True)
            continue
        result.ok = True
        result.line_count = rendered.count("\n")
        result.bytes_written = len(data)
        result.error = None
    report.elapsed_ms = int((time.perf_counter() - started) * 1000)
    if write_report:
        report_path = out_dir / REPORT_FILENAME
        tmp = report_path.with_name(report_path.name + ".tmp")
        tmp.write_text(json.dumps(report.to_doc(), indent=2) + "\n", encoding="utf-8")
        tmp.replace(report_path)
    return report


def format_report_table(report: GenReport) -> str:
    """Human-readable table for CLI output."""
    rows = [("output", "status", "lines", "bytes")]
    for entry in report.entries:
        rows.append(
            (
                entry.output_path,
                "ok" if entry.ok else f"FAILED: {entry.error}",
                str(entry.line_count),
                str(entry.bytes_written),
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(4)]
    lines = [
        "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
        for row in rows
    ]
    lines.append(f"elapsed {report.elapsed_ms} ms")
    return "\n".join(lines)
