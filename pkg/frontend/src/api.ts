// Typed client for the workspace server's JSON API.
//
// Versions ride on ETag / If-Match headers; a stale save surfaces as a
// ConflictError carrying both versions so the caller can offer
// reload-and-replay.

import type { MetamodelDoc, Violation, WorkspaceDoc } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public element: number | null = null,
  ) {
    super(message);
  }
}

export class ConflictError extends ApiError {
  constructor(message: string, public expected: number, public stored: number) {
    super(409, "CONFLICT", message);
  }
}

export interface LoadResult {
  doc: WorkspaceDoc;
  version: number;
}

export interface WorkspaceSummary {
  id: string;
  name: string;
  metamodel: string;
  version: number;
  node_count: number;
  link_count: number;
  corrupt?: boolean;
}

function parseEtag(raw: string | null): number {
  const token = (raw ?? "").replace(/"/g, "").trim();
  const version = Number.parseInt(token, 10);
  if (!Number.isFinite(version)) {
    throw new ApiError(0, "ETAG", `response carried no usable ETag: ${raw ?? "<none>"}`);
  }
  return version;
}

async function raiseFor(response: Response): Promise<never> {
  let code = "HTTP";
  let message = `${response.status} ${response.statusText}`;
  let element: number | null = null;
  try {
    const body = await response.json();
    code = body.code ?? code;
    message = body.message ?? message;
    element = body.element ?? null;
  } catch {
    // non-JSON error body; keep the status line
  }
  if (response.status === 409) {
    const match = /expected (\d+).*holds (\d+)/.exec(message);
    throw new ConflictError(
      message,
      match ? Number(match[1]) : -1,
      match ? Number(match[2]) : -1,
    );
  }
  throw new ApiError(response.status, code, message, element);
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: typeof fetch = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) await raiseFor(response);
    return response;
  }

  async listWorkspaces(): Promise<WorkspaceSummary[]> {
    const response = await this.request("/workspaces");
    return (await response.json()).workspaces as WorkspaceSummary[];
  }

  async loadWorkspace(id: string): Promise<LoadResult> {
    const response = await this.request(`/workspaces/${encodeURIComponent(id)}`);
    return {
      doc: (await response.json()) as WorkspaceDoc,
      version: parseEtag(response.headers.get("etag")),
    };
  }

  async saveWorkspace(doc: WorkspaceDoc, expected: number): Promise<number> {
    const response = await this.request(`/workspaces/${encodeURIComponent(doc.id)}`, {
      method: "PUT",
      headers: { "If-Match": `"${expected}"`, "Content-Type": "application/json" },
      body: JSON.stringify(doc),
    });
    return ((await response.json()) as { version: number }).version;
  }

  async validateWorkspace(id: string): Promise<Violation[]> {
    const response = await this.request(
      `/workspaces/${encodeURIComponent(id)}/validate`,
      { method: "POST" },
    );
    return (await response.json()).violations as Violation[];
  }

  async getMetamodel(name: string): Promise<MetamodelDoc> {
    const response = await this.request(`/metamodels/${encodeURIComponent(name)}`);
    return (await response.json()) as MetamodelDoc;
  }
}
