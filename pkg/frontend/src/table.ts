// The records table: one row per material-T_c pair, grouped by document
// with alternating backgrounds, sortable columns, and the four curation
// controls in the last column.

import type { ActionKind, RecordPage, RecordRow, SortKey } from "./types.js";

export interface TableHandlers {
  onSort(key: SortKey): void;
  onAction(record: RecordRow, kind: ActionKind): void;
  onSelect(record: RecordRow): void;
}

const COLUMNS: { key: SortKey | null; title: string }[] = [
  { key: "document_id", title: "document" },
  { key: "material", title: "material" },
  { key: null, title: "formula" },
  { key: "tc_kelvin", title: "T_c" },
  { key: "pressure_gpa", title: "pressure" },
  { key: null, title: "state" },
  { key: "updated_at", title: "updated" },
  { key: null, title: "actions" },
];

const ACTION_TITLES: Record<ActionKind, string> = {
  mark_valid: "valid",
  mark_invalid: "invalid",
  update: "update",
  remove: "remove",
};

export function renderRecordsTable(
  container: HTMLElement,
  page: RecordPage,
  handlers: TableHandlers,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  if (page.total === 0) {
    const empty = doc.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No records match the current filters.";
    container.appendChild(empty);
    return;
  }

  const table = doc.createElement("table");
  table.className = "records-table";
  const head = doc.createElement("thead");
  const headRow = doc.createElement("tr");
  for (const column of COLUMNS) {
    const cell = doc.createElement("th");
    cell.textContent = column.title;
    if (column.key) {
      const key = column.key;
      cell.classList.add("sortable");
      cell.addEventListener("click", () => handlers.onSort(key));
    }
    headRow.appendChild(cell);
  }
  head.appendChild(headRow);
  table.appendChild(head);

  const body = doc.createElement("tbody");
  let groupIndex = -1;
  let currentDocument: string | null = null;
  for (const record of page.rows) {
    if (record.document_id !== currentDocument) {
      currentDocument = record.document_id;
      groupIndex += 1;
    }
    body.appendChild(buildRow(doc, record, groupIndex, handlers));
  }
  table.appendChild(body);
  container.appendChild(table);
}

function buildRow(
  doc: Document,
  record: RecordRow,
  groupIndex: number,
  handlers: TableHandlers,
): HTMLTableRowElement {
  const row = doc.createElement("tr");
  row.className = groupIndex % 2 === 0 ? "group-even" : "group-odd";
  row.dataset.recordId = record.record_id;
  row.dataset.documentId = record.document_id;
  row.addEventListener("click", () => handlers.onSelect(record));

  const cells = [
    record.document_id,
    record.material_raw,
    record.formula,
    record.tc_kelvin !== null ? `${record.tc_kelvin} K` : record.tc_raw,
    record.pressure_gpa !== null ? `${record.pressure_gpa} GPa` : record.pressure_raw ?? "",
    `${record.state.agent}, ${record.state.status}`,
    record.updated_at,
  ];
  for (const value of cells) {
    const cell = doc.createElement("td");
    cell.textContent = value;
    row.appendChild(cell);
  }

  const actionsCell = doc.createElement("td");
  actionsCell.className = "actions";
  for (const kind of Object.keys(ACTION_TITLES) as ActionKind[]) {
    const button = doc.createElement("button");
    button.textContent = ACTION_TITLES[kind];
    button.dataset.action = kind;
    button.disabled = !record.allowed_actions.includes(kind);
    button.addEventListener("click", (event) => {
      event.stopPropagation();
      handlers.onAction(record, kind);
    });
    actionsCell.appendChild(button);
  }
  row.appendChild(actionsCell);
  return row;
}

/** Highlight the row for a record, e.g. after a viewer span was clicked. */
export function selectRow(container: HTMLElement, recordId: string): void {
  for (const row of Array.from(
    container.querySelectorAll<HTMLTableRowElement>("tr[data-record-id]"),
  )) {
    row.classList.toggle("selected", row.dataset.recordId === recordId);
  }
}
