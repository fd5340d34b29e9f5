// Shapes of the staging-area HTTP API. Field names mirror the server's
// canonical JSON exactly.

export type Agent = "automatic" | "manual";
export type RecordStatus =
  | "new"
  | "curated"
  | "validated"
  | "invalid"
  | "obsolete"
  | "removed";

export interface CurationStateJson {
  agent: Agent;
  status: RecordStatus;
}

export type ActionKind = "mark_valid" | "mark_invalid" | "update" | "remove";

export const ERROR_TYPES = [
  "from_table",
  "extraction",
  "linking",
  "tc_classification",
  "composition_resolution",
  "value_resolution",
  "anomaly_detection",
  "curation_amends",
] as const;
export type ErrorType = (typeof ERROR_TYPES)[number];

export const ENTITY_LABELS = [
  "class",
  "material",
  "me_method",
  "pressure",
  "tc",
  "tcValue",
] as const;
export type EntityLabel = (typeof ENTITY_LABELS)[number];

export interface SpanJson {
  start: number;
  end: number;
  label: EntityLabel;
  text: string;
}

export interface PassageJson {
  passage_id: string;
  document_id: string;
  text: string;
  spans: SpanJson[];
  layout_tokens: LayoutTokenJson[];
}

export interface LayoutTokenJson {
  text: string;
  page: number;
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface RecordRow {
  record_id: string;
  document_id: string;
  material_raw: string;
  formula: string;
  tc_raw: string;
  tc_kelvin: number | null;
  pressure_raw: string | null;
  pressure_gpa: number | null;
  passage_id: string;
  state: CurationStateJson;
  error_type: ErrorType | null;
  previous_version: string | null;
  created_at: string;
  updated_at: string;
  last_editor: string | null;
  allowed_actions: ActionKind[];
}

export interface RecordPage {
  rows: RecordRow[];
  total: number;
}

export interface DocumentView {
  document_id: string;
  passages: PassageJson[];
  records: RecordRow[];
}

export interface TrainingExampleJson {
  example_id: string;
  document_id: string;
  passage_text: string;
  spans: SpanJson[];
  layout_tokens: LayoutTokenJson[];
  status: "pending" | "sent" | "exported" | "deleted";
  source_record_id: string;
  captured_at: string;
}

export interface ProcessingLogJson {
  document_id: string;
  outcome: "ok" | "failed";
  reason: string | null;
  counts: { passages: number; records: number };
  timestamp: string;
}

export interface CurationLogJson {
  record_id: string;
  action: ActionKind;
  user: string;
  error_type: ErrorType | null;
  timestamp: string;
  update_count_after: number;
  new_record_id: string | null;
}

export interface ActionResult {
  new_state: CurationStateJson;
  new_record_id: string | null;
  training_captured: boolean;
}

export type SortKey =
  | "document_id"
  | "material"
  | "tc_kelvin"
  | "pressure_gpa"
  | "updated_at";

export interface RecordQuery {
  status?: RecordStatus;
  error_type?: ErrorType;
  document_id?: string;
  material?: string;
  tc_min?: number;
  tc_max?: number;
  pressure_min?: number;
  pressure_max?: number;
  sort: SortKey;
  direction: "asc" | "desc";
  page: number;
  size: number;
}

export const DEFAULT_QUERY: RecordQuery = {
  sort: "document_id",
  direction: "asc",
  page: 1,
  size: 50,
};
