// Typed client for the staging-area API. All UI state flows through these
// calls; the UI never invents record states locally.

import type {
  ActionKind,
  ActionResult,
  CurationLogJson,
  DocumentView,
  ErrorType,
  ProcessingLogJson,
  RecordPage,
  RecordQuery,
  RecordRow,
  TrainingExampleJson,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export interface ActionBody {
  user: string;
  error_type?: ErrorType;
  payload?: Record<string, string | null>;
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private token?: string,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["X-Auth-Token"] = this.token;
    const response = await fetch(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let code = `http_${response.status}`;
      let message = response.statusText;
      try {
        const data = (await response.json()) as { code?: string; message?: string };
        code = data.code ?? code;
        message = data.message ?? message;
      } catch {
        // non-JSON error body; keep the transport fallback
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  listRecords(query: RecordQuery): Promise<RecordPage> {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(query)) {
      if (value !== undefined && value !== null && value !== "") {
        params.set(key, String(value));
      }
    }
    return this.request("GET", `/records?${params.toString()}`);
  }

  getRecord(recordId: string): Promise<RecordRow> {
    return this.request("GET", `/records/${recordId}`);
  }

  getHistory(recordId: string): Promise<{ record: RecordRow; log: CurationLogJson[] }[]> {
    return this.request("GET", `/records/${recordId}/history`);
  }

  applyAction(recordId: string, kind: ActionKind, body: ActionBody): Promise<ActionResult> {
    const path = {
      mark_valid: "mark-valid",
      mark_invalid: "mark-invalid",
      update: "update",
      remove: "remove",
    }[kind];
    return this.request("POST", `/records/${recordId}/${path}`, body);
  }

  getDocument(documentId: string): Promise<DocumentView> {
    return this.request("GET", `/documents/${documentId}`);
  }

  scan(scope: { document?: string; status?: string } = {}): Promise<unknown> {
    return this.request("POST", "/scan", scope);
  }

  listTraining(status?: string): Promise<TrainingExampleJson[]> {
    const suffix = status ? `?status=${encodeURIComponent(status)}` : "";
    return this.request("GET", `/training${suffix}`);
  }

  markSent(exampleId: string): Promise<TrainingExampleJson> {
    return this.request("POST", `/training/${exampleId}/mark-sent`);
  }

  deleteExample(exampleId: string): Promise<unknown> {
    return this.request("DELETE", `/training/${exampleId}`);
  }

  exportTraining(): Promise<unknown[]> {
    return this.request("GET", "/training/export");
  }

  processingLog(): Promise<ProcessingLogJson[]> {
    return this.request("GET", "/logs/processing");
  }

  curationLog(recordId?: string): Promise<CurationLogJson[]> {
    const suffix = recordId ? `?record_id=${encodeURIComponent(recordId)}` : "";
    return this.request("GET", `/logs/curation${suffix}`);
  }

  ingest(payload: unknown): Promise<ProcessingLogJson> {
    return this.request("POST", "/ingest", payload);
  }

  stats(): Promise<{ by_status: Record<string, number>; total_visible: number }> {
    return this.request("GET", "/stats");
  }
}
