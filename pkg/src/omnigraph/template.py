"""Comment-driven template engine.

A template is a runnable example file whose generation logic lives in
comments, so the template itself stays valid code:

    //[# foreach m in node[type=Miron] #]
    //: NAME=m.attr(name)
      "__NAME__",
    //[# end #]

Command lines are `<marker>[# ... #]` with vocabulary {foreach, if, else,
end}; parameter lines `<marker>: NAME=expr` bind uppercase placeholders to
value expressions over the element currently iterated (attr access, id,
label, type). Everything else is literal text, emitted verbatim.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError, QueryError, RenderError
from .graph import Workspace, WorkspaceRef
from .query import QueryExpr, Selection, parse_literal, parse_query, run_query

_PLACEHOLDER_RE = re.compile(r"__[A-Z][A-Z0-9_]*__")
_BINDING_NAME_RE = re.compile(r"[A-Z][A-Z0-9_]*")
_VAR_RE = re.compile(r"[a-z_][a-z0-9_]*")


@dataclass(frozen=True)
class ValueExpr:
    """Accessor over a bound element: var.attr(key), var.id, var.label, var.type."""

    var: str
    accessor: str  # "attr" | "id" | "label" | "type"
    key: str | None = None
    src: str = ""


@dataclass(frozen=True)
class Binding:
    name: str
    expr: ValueExpr
    line: int


@dataclass
class Literal:
    lines: list = field(default_factory=list)


@dataclass
class ForEach:
    var: str
    query: QueryExpr
    header: str
    bindings: list = field(default_factory=list)
    body: list = field(default_factory=list)
    line: int = 0


@dataclass
class If:
    cond: "Cond"
    header: str
    bindings: list = field(default_factory=list)
    then: list = field(default_factory=list)
    orelse: list = field(default_factory=list)
    line: int = 0


@dataclass(frozen=True)
class Cond:
    left: ValueExpr
    op: str | None  # "==", "!=", or None for bare truthiness
    right: object = None


@dataclass
class TemplateDocument:
    source_path: str
    comment_marker: str
    segments: list
    warnings: list = field(default_factory=list)
    trailing_newline: bool = True


def _parse_value_expr(text: str, line: int) -> ValueExpr:
    text = text.strip()
    match = re.fullmatch(r"({var})\.attr\(\s*([^)\s]+)\s*\)".format(var=_VAR_RE.pattern), text)
    if match:
        return ValueExpr(match.group(1), "attr", match.group(2), text)
    match = re.fullmatch(r"({var})\.(id|label|type)".format(var=_VAR_RE.pattern), text)
    if match:
        return ValueExpr(match.group(1), match.group(2), None, text)
    raise ParseError(f"cannot parse value expression {text!r}", line)


def _parse_cond(text: str, line: int) -> Cond:
    for op in ("==", "!="):
        if op in text:
            left, right = text.split(op, 1)
            return Cond(_parse_value_expr(left, line), op, parse_literal(right.strip()))
    return Cond(_parse_value_expr(text, line), None)


def parse_template(text: str, comment_marker: str = "//", source_path: str = "<string>") -> TemplateDocument:
    """Parse template text into a command tree; raises ParseError with line numbers."""
    if not comment_marker:
        raise ParseError("comment marker must be non-empty")
    command_re = re.compile(
        r"^\s*" + re.escape(comment_marker) + r"\[#\s*(.*?)\s*#\]\s*$"
    )
    binding_re = re.compile(
        r"^\s*" + re.escape(comment_marker) + r":\s*(.*?)\s*$"
    )
    root: list = []
    stack: list = []  # open ForEach / If blocks
    warnings: list = []

    def sink() -> list:
        if not stack:
            return root
        top = stack[-1]
        if isinstance(top, ForEach):
            return top.body
        return top.orelse if getattr(top, "_in_else", False) else top.then

    def literal_lines(target: list) -> Literal:
        if target and isinstance(target[-1], Literal):
            return target[-1]
        block = Literal()
        target.append(block)
        return block

    for lineno, raw in enumerate(text.splitlines(), start=1):
        command = command_re.match(raw)
        if command:
            words = command.group(1)
            head = words.split(None, 1)[0] if words else ""
            rest = words[len(head):].strip()
            if head == "foreach":
                match = re.fullmatch(
                    r"({var})\s+in\s+(.+)".format(var=_VAR_RE.pattern), rest
                )
                if not match:
                    raise ParseError("foreach needs: foreach <var> in <query>", lineno)
                var = match.group(1)
                for open_block in stack:
                    if isinstance(open_block, ForEach) and open_block.var == var:
                        raise ParseError(f"variable {var!r} already bound on this path", lineno)
                try:
                    query = parse_query(match.group(2))
                except ParseError as exc:
                    raise ParseError(f"in foreach query: {exc}", lineno) from exc
                block = ForEach(var, query, raw, line=lineno)
                sink().append(block)
                stack.append(block)
            elif head == "if":
                if not rest:
                    raise ParseError("if needs a condition", lineno)
                block = If(_parse_cond(rest, lineno), raw, line=lineno)
                sink().append(block)
                stack.append(block)
            elif head == "else":
                if rest:
                    raise ParseError("else takes no arguments", lineno)
                if not stack or not isinstance(stack[-1], If):
                    raise ParseError("else outside an if block", lineno)
                if getattr(stack[-1], "_in_else", False):
                    raise ParseError("duplicate else in if block", lineno)
                stack[-1]._in_else = True
            elif head == "end":
                if rest:
                    raise ParseError("end takes no arguments", lineno)
                if not stack:
                    raise ParseError("unbalanced end: no open block", lineno)
                stack.pop()
            else:
                raise ParseError(f"unknown command word {head!r}", lineno)
            continue
        binding = binding_re.match(raw)
        if binding:
            body = binding.group(1)
            if "=" not in body:
                raise ParseError(f"malformed binding (no '='): {body!r}", lineno)
            name, expr_text = body.split("=", 1)
            name = name.strip()
            if not _BINDING_NAME_RE.fullmatch(name):
                raise ParseError(
                    f"binding name must be UPPERCASE (placeholder __{name}__), got {name!r}",
                    lineno,
                )
            if not stack:
                raise ParseError("binding line outside any block command", lineno)
            stack[-1].bindings.append(Binding(name, _parse_value_expr(expr_text, lineno), lineno))
            continue
        literal_lines(sink()).lines.append(raw)

    if stack:
        raise ParseError(
            f"block opened here is never closed with end", stack[-1].line
        )

    _warn_unused_placeholders(root, warnings)
    return TemplateDocument(
        source_path, comment_marker, root, warnings,
        trailing_newline=text.endswith("\n") or text == "",
    )


def _warn_unused_placeholders(segments: list, warnings: list) -> None:
    def literal_text(seg_list) -> str:
        parts = []
        for seg in seg_list:
            if isinstance(seg, Literal):
                parts.extend(seg.lines)
            elif isinstance(seg, ForEach):
                parts.append(literal_text(seg.body))
            elif isinstance(seg, If):
                parts.append(literal_text(seg.then))
                parts.append(literal_text(seg.orelse))
        return "\n".join(parts)

    def walk(seg_list):
        for seg in seg_list:
            if isinstance(seg, ForEach):
                body_text = literal_text(seg.body)
                for binding in seg.bindings:
                    if f"__{binding.name}__" not in body_text:
                        warnings.append(
                            f"line {binding.line}: placeholder __{binding.name}__ "
                            "never occurs in the block body"
                        )
                walk(seg.body)
            elif isinstance(seg, If):
                walk(seg.then)
                walk(seg.orelse)

    walk(segments)


def unparse_template(tpl: TemplateDocument) -> str:
    """Reconstruct template text from the command tree (parse fixed point)."""
    out: list = []

    def emit(seg_list):
        for seg in seg_list:
            if isinstance(seg, Literal):
                out.extend(seg.lines)
            elif isinstance(seg, ForEach):
                out.append(seg.header)
                for b in seg.bindings:
                    out.append(f"{tpl.comment_marker}: {b.name}={b.expr.src}")
                emit(seg.body)
                out.append(f"{tpl.comment_marker}[# end #]")
            elif isinstance(seg, If):
                out.append(seg.header)
                for b in seg.bindings:
                    out.append(f"{tpl.comment_marker}: {b.name}={b.expr.src}")
                emit(seg.then)
                if seg.orelse or getattr(seg, "_in_else", False):
                    out.append(f"{tpl.comment_marker}[# else #]")
                    emit(seg.orelse)
                out.append(f"{tpl.comment_marker}[# end #]")

    emit(tpl.segments)
    return "\n".join(out) + ("\n" if out and tpl.trailing_newline else "")


# -- rendering -------------------------------------------------------------------


def render_value(value) -> str:
    """Fixed value-to-text rules: bare strings, decimal ints, true/false,
    comma-joined lists."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ", ".join(render_value(v) for v in value)
    if isinstance(value, WorkspaceRef):
        return value.workspace_id
    raise RenderError(f"cannot render value of type {type(value).__name__}")


def _eval_expr(expr: ValueExpr, env: dict, ws: Workspace, mm) -> object:
    if expr.var not in env:
        raise RenderError(f"variable {expr.var!r} is not bound by any enclosing foreach")
    element_id = env[expr.var]
    element = ws.element(element_id)
    if expr.accessor == "id":
        return element.id
    if expr.accessor == "label":
        return getattr(element, "label", "")
    if expr.accessor == "type":
        return element.type_name
    if expr.key in element.attrs:
        return element.attrs[expr.key]
    if mm is not None:
        type_def = mm.node_types.get(element.type_name) or mm.link_types.get(element.type_name)
        schema = getattr(type_def, "attr_schema", None)
        if schema and expr.key in schema and schema[expr.key].default is not None:
            return schema[expr.key].default
    raise RenderError(
        f"element {element_id} has no attribute {expr.key!r} (and no metamodel default)"
    )


def _truthy(value) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return value != 0
    if isinstance(value, str):
        return value != ""
    if isinstance(value, list):
        return len(value) > 0
    return True


def render(
    tpl: TemplateDocument,
    ws: Workspace,
    mm=None,
    root: Selection | None = None,
) -> str:
    """Render a template against a workspace; byte-deterministic for fixed inputs.

    `root` supplies the selection that `foreach ... in root` iterates (set by
    generation-plan entries).
    """
    out: list = []

    def substitute(line: str, bindings: dict, inside_loop: bool) -> str:
        if bindings:
            def replace(match):
                name = match.group(0)[2:-2]
                if name in bindings:
                    return bindings[name]
                raise RenderError(f"unbound placeholder __{name}__ left in output")
            return _PLACEHOLDER_RE.sub(replace, line)
        if inside_loop:
            leftover = _PLACEHOLDER_RE.search(line)
            if leftover:
                raise RenderError(f"unbound placeholder {leftover.group(0)} left in output")
        return line

    def emit(seg_list, env: dict, bindings: dict, inside_loop: bool):
        for seg in seg_list:
            if isinstance(seg, Literal):
                for line in seg.lines:
                    out.append(substitute(line, bindings, inside_loop))
            elif isinstance(seg, ForEach):
                try:
                    selection = run_query(ws, seg.query, root=root)
                except QueryError as exc:
                    raise RenderError(f"foreach query failed: {exc}") from exc
                for element_id in selection.ids:
                    env_inner = dict(env)
                    env_inner[seg.var] = element_id
                    bound = dict(bindings)
                    for binding in seg.bindings:
                        bound[binding.name] = render_value(
                            _eval_expr(binding.expr, env_inner, ws, mm)
                        )
                    emit(seg.body, env_inner, bound, True)
            elif isinstance(seg, If):
                left = _eval_expr(seg.cond.left, env, ws, mm)
                if seg.cond.op is None:
                    taken = _truthy(left)
                elif seg.cond.op == "==":
                    taken = left == seg.cond.right
                else:
                    taken = left != seg.cond.right
                bound = dict(bindings)
                for binding in seg.bindings:
                    bound[binding.name] = render_value(_eval_expr(binding.expr, env, ws, mm))
                emit(seg.then if taken else seg.orelse, env, bound, inside_loop)

    emit(tpl.segments, {}, {}, False)
    return "\n".join(out) + ("\n" if out and tpl.trailing_newline else "")
