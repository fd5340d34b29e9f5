// Linked document viewer: passages rendered with entity highlights at the
// exact span offsets. Clicking a record in the table scrolls to and marks
// its source passage; clicking a highlight selects the table row.

import { LABEL_COLORS } from "./labels.js";
import type { DocumentView, PassageJson, RecordRow, SpanJson } from "./types.js";

export interface ViewerHandlers {
  onSpanClick(passage: PassageJson, span: SpanJson): void;
}

export class DocumentViewer {
  readonly root: HTMLElement;
  private passageNodes = new Map<string, HTMLElement>();

  constructor(
    doc: Document,
    private view: DocumentView,
    private handlers: ViewerHandlers,
  ) {
    this.root = doc.createElement("div");
    this.root.className = "document-viewer";
    this.root.dataset.documentId = view.document_id;
    for (const passage of view.passages) {
      const node = this.renderPassage(doc, passage);
      this.passageNodes.set(passage.passage_id, node);
      this.root.appendChild(node);
    }
  }

  private renderPassage(doc: Document, passage: PassageJson): HTMLElement {
    const node = doc.createElement("p");
    node.className = "passage";
    node.dataset.passageId = passage.passage_id;
    const spans = [...passage.spans].sort((a, b) => a.start - b.start);
    let cursor = 0;
    for (const span of spans) {
      if (span.start > cursor) {
        node.appendChild(doc.createTextNode(passage.text.slice(cursor, span.start)));
      }
      const mark = doc.createElement("mark");
      mark.className = "entity";
      mark.dataset.label = span.label;
      mark.dataset.start = String(span.start);
      mark.dataset.end = String(span.end);
      mark.style.backgroundColor = LABEL_COLORS[span.label];
      mark.title = span.label; // hover shows the label name
      mark.textContent = passage.text.slice(span.start, span.end);
      mark.addEventListener("click", () => this.handlers.onSpanClick(passage, span));
      node.appendChild(mark);
      cursor = span.end;
    }
    if (cursor < passage.text.length) {
      node.appendChild(doc.createTextNode(passage.text.slice(cursor)));
    }
    return node;
  }

  /**
   * Navigate to a record's source passage: marks it (and clears any earlier
   * mark) and scrolls it into view. Returns the passage element, or null
   * when the record points outside this document.
   */
  focusRecord(record: RecordRow): HTMLElement | null {
    const target = this.passageNodes.get(record.passage_id) ?? null;
    for (const node of this.passageNodes.values()) {
      node.classList.toggle("focused", node === target);
    }
    if (target && typeof target.scrollIntoView === "function") {
      target.scrollIntoView({ block: "center" });
    }
    return target;
  }

  /** The passage id currently marked as focused, if any. */
  focusedPassageId(): string | null {
    for (const [passageId, node] of this.passageNodes) {
      if (node.classList.contains("focused")) return passageId;
    }
    return null;
  }
}

/** Records whose source span sits inside the given passage. */
export function recordsForPassage(view: DocumentView, passageId: string): RecordRow[] {
  return view.records.filter((r) => r.passage_id === passageId);
}
