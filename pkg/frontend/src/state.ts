// View state and the action-draft gate. An update/remove draft without an
// error type is never submittable, so no request can leave without one.

import type {
  ActionKind,
  ErrorType,
  RecordQuery,
  RecordRow,
} from "./types.js";
import { DEFAULT_QUERY } from "./types.js";

export interface ActionDraft {
  kind: ActionKind;
  user: string;
  errorType: ErrorType | null;
  payload: Record<string, string>;
}

export interface ViewState {
  query: RecordQuery;
  selectedRecord: RecordRow | null;
  selectedDocument: string | null;
  draft: ActionDraft | null;
}

export function initialViewState(): ViewState {
  return {
    query: { ...DEFAULT_QUERY },
    selectedRecord: null,
    selectedDocument: null,
    draft: null,
  };
}

export function newDraft(kind: ActionKind, user: string): ActionDraft {
  return { kind, user, errorType: null, payload: {} };
}

/** Why a draft cannot be submitted yet, or null when it is ready. */
export function draftBlockReason(draft: ActionDraft): string | null {
  if (!draft.user) return "a curator id is required";
  if ((draft.kind === "update" || draft.kind === "remove") && !draft.errorType) {
    return "select an error type";
  }
  if (draft.kind === "update" && Object.keys(draft.payload).length === 0) {
    return "change at least one field";
  }
  return null;
}

export function canSubmitDraft(draft: ActionDraft): boolean {
  return draftBlockReason(draft) === null;
}

/** Toggle sorting on a column: first click sorts ascending, second flips. */
export function toggleSort(query: RecordQuery, key: RecordQuery["sort"]): RecordQuery {
  if (query.sort === key) {
    return { ...query, direction: query.direction === "asc" ? "desc" : "asc", page: 1 };
  }
  return { ...query, sort: key, direction: "asc", page: 1 };
}

export function withFilter(
  query: RecordQuery,
  patch: Partial<RecordQuery>,
): RecordQuery {
  return { ...query, ...patch, page: 1 };
}
