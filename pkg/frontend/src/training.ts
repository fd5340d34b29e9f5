// Training-data management page: one row per collected example with the
// passage text decorated by its spans, the lifecycle status, and the
// delete / mark-sent / export controls.

import { LABEL_COLORS } from "./labels.js";
import type { TrainingExampleJson } from "./types.js";

export interface TrainingHandlers {
  onMarkSent(example: TrainingExampleJson): void;
  onDelete(example: TrainingExampleJson): void;
  onExport(): void;
}

export function renderTrainingPage(
  container: HTMLElement,
  examples: TrainingExampleJson[],
  handlers: TrainingHandlers,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";

  const toolbar = doc.createElement("div");
  toolbar.className = "training-toolbar";
  const exportButton = doc.createElement("button");
  exportButton.className = "training-export";
  exportButton.textContent = "export";
  exportButton.addEventListener("click", () => handlers.onExport());
  toolbar.appendChild(exportButton);
  container.appendChild(toolbar);

  if (examples.length === 0) {
    const empty = doc.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No training examples collected yet.";
    container.appendChild(empty);
    return;
  }

  const table = doc.createElement("table");
  table.className = "training-table";
  const body = doc.createElement("tbody");
  for (const example of examples) {
    body.appendChild(buildExampleRow(doc, example, handlers));
  }
  table.appendChild(body);
  container.appendChild(table);
}

function buildExampleRow(
  doc: Document,
  example: TrainingExampleJson,
  handlers: TrainingHandlers,
): HTMLTableRowElement {
  const row = doc.createElement("tr");
  row.className = "training-example";
  row.dataset.exampleId = example.example_id;
  row.dataset.status = example.status;

  const textCell = doc.createElement("td");
  const spans = [...example.spans].sort((a, b) => a.start - b.start);
  let cursor = 0;
  for (const span of spans) {
    if (span.start > cursor) {
      textCell.appendChild(
        doc.createTextNode(example.passage_text.slice(cursor, span.start)),
      );
    }
    const mark = doc.createElement("mark");
    mark.style.backgroundColor = LABEL_COLORS[span.label];
    mark.title = span.label;
    mark.textContent = example.passage_text.slice(span.start, span.end);
    textCell.appendChild(mark);
    cursor = span.end;
  }
  if (cursor < example.passage_text.length) {
    textCell.appendChild(doc.createTextNode(example.passage_text.slice(cursor)));
  }
  row.appendChild(textCell);

  const docCell = doc.createElement("td");
  docCell.textContent = example.document_id;
  row.appendChild(docCell);

  const statusCell = doc.createElement("td");
  statusCell.className = "training-status";
  statusCell.textContent = example.status;
  row.appendChild(statusCell);

  const controls = doc.createElement("td");
  const sendButton = doc.createElement("button");
  sendButton.textContent = "mark sent";
  sendButton.disabled = example.status !== "pending";
  sendButton.addEventListener("click", () => handlers.onMarkSent(example));
  controls.appendChild(sendButton);
  const deleteButton = doc.createElement("button");
  deleteButton.textContent = "delete";
  deleteButton.disabled = example.status === "exported" || example.status === "deleted";
  deleteButton.addEventListener("click", () => handlers.onDelete(example));
  controls.appendChild(deleteButton);
  row.appendChild(controls);

  return row;
}
