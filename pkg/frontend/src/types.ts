// Shapes of the documents the workspace server speaks.

export type AttrValue =
  | string
  | number
  | boolean
  | AttrValue[]
  | { workspace: string };

export interface NodeDoc {
  id: number;
  type: string;
  label: string;
  parent: number | null;
  x: number;
  y: number;
  w: number;
  h: number;
  attrs: Record<string, AttrValue>;
  payload: unknown;
}

export interface LinkDoc {
  id: number;
  type: string;
  from: number;
  to: number;
  attrs: Record<string, AttrValue>;
}

export interface WorkspaceDoc {
  format: string;
  fversion: number;
  id: string;
  name: string;
  metamodel: string;
  version: number;
  next_id: number;
  viewport: { cx: number; cy: number; zoom: number };
  history: string[];
  nodes: NodeDoc[];
  links: LinkDoc[];
}

export interface AttrSpecDoc {
  kind: string;
  required: boolean;
  default: AttrValue | null;
  enum: string[] | null;
}

export interface NodeTypeDoc {
  container: boolean;
  shape: string;
  fill: string;
  show: string[];
  label: string;
  attrs: Record<string, AttrSpecDoc>;
}

export interface LinkStyleDoc {
  stroke: string;
  head: string;
  color: string;
}

export interface LinkTypeDoc {
  endpoints: string[];
  self: boolean;
  max_out: number | null;
  max_in: number | null;
  style: LinkStyleDoc;
}

export interface MetamodelDoc {
  id: string;
  name: string;
  node_types: Record<string, NodeTypeDoc>;
  link_types: Record<string, LinkTypeDoc>;
  styles: Array<{ from: string; to: string } & LinkStyleDoc>;
  palette: Array<{ label: string; type: string; shape: string; fill: string }>;
}

export interface Violation {
  element: number;
  code: string;
  message: string;
}
