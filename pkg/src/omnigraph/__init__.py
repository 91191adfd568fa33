"""omnigraph: typed graph workspaces with metamodel-defined DSLs,
validation, queries, template code generation, and a file-backed server."""

from .errors import (
    ConflictError,
    FormatVersionError,
    GraphError,
    IntegrityError,
    MetaModelError,
    NotFoundError,
    OmniGraphError,
    ParseError,
    QueryError,
    RenderError,
    UnknownElementError,
)
from .graph import (
    Link,
    Node,
    PayloadRef,
    RemovalReport,
    Viewport,
    Workspace,
    WorkspaceRef,
    deserialize,
    new_workspace,
    serialize,
)
from .metamodel import (
    AttrSpec,
    LightParams,
    LinkTypeDef,
    MetaModel,
    NodeTypeDef,
    PaletteEntry,
    Violation,
    VisualStyle,
    VisualTemplate,
    dump_metamodel,
    light_create,
    load_metamodel,
    palette,
    resolve_link_style,
    validate,
)
from .query import QueryExpr, Selection, parse_query, query, run_query
from .mutate import MutationReport, execute, parse_script, run_batch
from .template import TemplateDocument, parse_template, render, render_value, unparse_template
from .codegen import GenPlan, GenReport, load_genplan, run_genplan
from .store import WorkspaceStore
from .bundled import bundled_metamodel, bundled_metamodel_ids, bundled_templates_dir

__version__ = "0.1.0"

__all__ = [
    "AttrSpec",
    "ConflictError",
    "FormatVersionError",
    "GenPlan",
    "GenReport",
    "GraphError",
    "IntegrityError",
    "LightParams",
    "Link",
    "LinkTypeDef",
    "MetaModel",
    "MetaModelError",
    "MutationReport",
    "Node",
    "NodeTypeDef",
    "NotFoundError",
    "OmniGraphError",
    "PaletteEntry",
    "ParseError",
    "PayloadRef",
    "QueryError",
    "QueryExpr",
    "RemovalReport",
    "RenderError",
    "Selection",
    "TemplateDocument",
    "UnknownElementError",
    "Violation",
    "Viewport",
    "VisualStyle",
    "VisualTemplate",
    "Workspace",
    "WorkspaceRef",
    "WorkspaceStore",
    "bundled_metamodel",
    "bundled_metamodel_ids",
    "bundled_templates_dir",
    "deserialize",
    "dump_metamodel",
    "execute",
    "light_create",
    "load_genplan",
    "load_metamodel",
    "new_workspace",
    "palette",
    "parse_query",
    "parse_script",
    "parse_template",
    "query",
    "render",
    "render_value",
    "resolve_link_style",
    "run_batch",
    "run_genplan",
    "run_query",
    "serialize",
    "unparse_template",
    "validate",
]
