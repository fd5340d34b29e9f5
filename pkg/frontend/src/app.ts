// Page wiring: tabs for records, document viewer, training data and logs.
// Every state change shown on screen comes from a fresh API read.

import { ApiClient, ApiError } from "./api.js";
import { showBanner } from "./banner.js";
import { ActionDialog } from "./dialog.js";
import { renderLegend } from "./labels.js";
import { renderCurationLog, renderProcessingLog } from "./logs.js";
import { initialViewState, toggleSort, withFilter } from "./state.js";
import { renderRecordsTable, selectRow } from "./table.js";
import { renderTrainingPage } from "./training.js";
import { DocumentViewer } from "./viewer.js";
import type { ActionKind, RecordRow, SortKey } from "./types.js";

export class App {
  private state = initialViewState();
  private viewer: DocumentViewer | null = null;

  constructor(
    private doc: Document,
    private client: ApiClient,
    private user: string,
  ) {}

  private el(id: string): HTMLElement {
    const node = this.doc.getElementById(id);
    if (!node) throw new Error(`missing #${id} in page scaffold`);
    return node;
  }

  async start(): Promise<void> {
    this.el("legend-slot").appendChild(renderLegend(this.doc));
    this.wireFilters();
    await this.refreshRecords();
    await this.refreshLogs();
    await this.refreshTraining();
  }

  private wireFilters(): void {
    const material = this.el("filter-material") as HTMLInputElement;
    material.addEventListener("change", () => {
      this.state.query = withFilter(this.state.query, {
        material: material.value || undefined,
      });
      void this.refreshRecords();
    });
    const status = this.el("filter-status") as HTMLSelectElement;
    status.addEventListener("change", () => {
      this.state.query = withFilter(this.state.query, {
        status: (status.value || undefined) as never,
      });
      void this.refreshRecords();
    });
  }

  async refreshRecords(): Promise<void> {
    try {
      const page = await this.client.listRecords(this.state.query);
      renderRecordsTable(this.el("records"), page, {
        onSort: (key: SortKey) => {
          this.state.query = toggleSort(this.state.query, key);
          void this.refreshRecords();
        },
        onAction: (record, kind) => this.openDialog(record, kind),
        onSelect: (record) => void this.openDocument(record),
      });
    } catch (error) {
      this.report(error);
    }
  }

  private openDialog(record: RecordRow, kind: ActionKind): void {
    const host = this.el("dialog-slot");
    host.textContent = "";
    const dialog = new ActionDialog(this.doc, this.client, record, kind, this.user, {
      onApplied: () => {
        void this.refreshRecords();
        void this.refreshTraining();
        void this.refreshLogs();
      },
    });
    host.appendChild(dialog.root);
  }

  /** Open the linked viewer on the record's document and focus its passage. */
  async openDocument(record: RecordRow): Promise<void> {
    try {
      const view = await this.client.getDocument(record.document_id);
      this.state.selectedDocument = record.document_id;
      this.state.selectedRecord = record;
      const host = this.el("viewer");
      host.textContent = "";
      this.viewer = new DocumentViewer(this.doc, view, {
        onSpanClick: (passage) => {
          const match = view.records.find((r) => r.passage_id === passage.passage_id);
          if (match) selectRow(this.el("records"), match.record_id);
        },
      });
      host.appendChild(this.viewer.root);
      this.viewer.focusRecord(record);
    } catch (error) {
      this.report(error);
    }
  }

  async refreshTraining(): Promise<void> {
    try {
      const examples = await this.client.listTraining();
      renderTrainingPage(this.el("training"), examples, {
        onMarkSent: (example) =>
          void this.client
            .markSent(example.example_id)
            .then(() => this.refreshTraining())
            .catch((error) => this.report(error)),
        onDelete: (example) =>
          void this.client
            .deleteExample(example.example_id)
            .then(() => this.refreshTraining())
            .catch((error) => this.report(error)),
        onExport: () =>
          void this.client
            .exportTraining()
            .then((document_) => this.downloadExport(document_))
            .then(() => this.refreshTraining())
            .catch((error) => this.report(error)),
      });
    } catch (error) {
      this.report(error);
    }
  }

  private downloadExport(document_: unknown[]): void {
    const blob = new Blob([JSON.stringify(document_, null, 2)], {
      type: "application/json",
    });
    const link = this.doc.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "training-examples.json";
    link.click();
    URL.revokeObjectURL(link.href);
  }

  async refreshLogs(): Promise<void> {
    try {
      renderProcessingLog(this.el("processing-log"), await this.client.processingLog());
      renderCurationLog(
        this.el("curation-log"),
        await this.client.curationLog(),
        (recordId) =>
          void this.client
            .getRecord(recordId)
            .then((record) => this.openDocument(record))
            .catch((error) => this.report(error)),
      );
    } catch (error) {
      this.report(error);
    }
  }

  private report(error: unknown): void {
    const message =
      error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
    showBanner(this.el("banner-slot"), message);
  }
}

export function bootstrap(doc: Document): App {
  const params = new URLSearchParams(doc.defaultView?.location.search ?? "");
  const base = params.get("api") ?? "http://127.0.0.1:8787";
  const user = params.get("user") ?? "curator";
  const app = new App(doc, new ApiClient(base), user);
  void app.start();
  return app;
}
