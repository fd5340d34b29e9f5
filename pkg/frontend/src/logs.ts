// Processing and curation log views. Record ids in the curation log link
// back to the latest version of the record.

import type { CurationLogJson, ProcessingLogJson } from "./types.js";

export function renderProcessingLog(
  container: HTMLElement,
  entries: ProcessingLogJson[],
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  const table = doc.createElement("table");
  table.className = "log-table processing-log";
  for (const entry of entries) {
    const row = doc.createElement("tr");
    row.dataset.outcome = entry.outcome;
    const cells = [
      entry.timestamp,
      entry.document_id,
      entry.outcome,
      entry.reason ?? "",
      `passages=${entry.counts.passages} records=${entry.counts.records}`,
    ];
    for (const value of cells) {
      const cell = doc.createElement("td");
      cell.textContent = value;
      row.appendChild(cell);
    }
    table.appendChild(row);
  }
  container.appendChild(table);
}

export function renderCurationLog(
  container: HTMLElement,
  entries: CurationLogJson[],
  onRecordClick: (recordId: string) => void,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  const table = doc.createElement("table");
  table.className = "log-table curation-log";
  for (const entry of entries) {
    const row = doc.createElement("tr");
    const link = doc.createElement("a");
    link.href = "#";
    link.textContent = entry.record_id;
    link.addEventListener("click", (event) => {
      event.preventDefault();
      onRecordClick(entry.record_id);
    });
    const linkCell = doc.createElement("td");
    linkCell.appendChild(link);
    row.appendChild(linkCell);
    const cells = [
      entry.action,
      entry.user,
      entry.error_type ?? "",
      String(entry.update_count_after),
      entry.timestamp,
    ];
    for (const value of cells) {
      const cell = doc.createElement("td");
      cell.textContent = value;
      row.appendChild(cell);
    }
    table.appendChild(row);
  }
  container.appendChild(table);
}
