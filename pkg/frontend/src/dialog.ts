// Action dialog. Update shows editable fields; update and remove demand an
// error type before anything leaves the browser. Server rejections stay in
// the dialog so the curator can adjust.

import { ApiClient, ApiError } from "./api.js";
import type { ActionDraft } from "./state.js";
import { draftBlockReason, newDraft } from "./state.js";
import type { ActionKind, ErrorType, RecordRow } from "./types.js";
import { ERROR_TYPES } from "./types.js";

const EDITABLE_FIELDS = ["material_raw", "formula", "tc_raw", "pressure_raw"] as const;

export interface DialogCallbacks {
  onApplied(): void;
}

export class ActionDialog {
  readonly root: HTMLElement;
  readonly draft: ActionDraft;
  private message: HTMLElement;

  constructor(
    private doc: Document,
    private client: ApiClient,
    private record: RecordRow,
    kind: ActionKind,
    user: string,
    private callbacks: DialogCallbacks,
  ) {
    this.draft = newDraft(kind, user);
    this.root = doc.createElement("div");
    this.root.className = "action-dialog";
    this.root.dataset.kind = kind;

    const title = doc.createElement("h3");
    title.textContent = `${kind.replace("_", " ")}: ${record.material_raw}`;
    this.root.appendChild(title);

    if (kind === "update") {
      for (const field of EDITABLE_FIELDS) {
        this.root.appendChild(this.buildFieldInput(field));
      }
    }
    if (kind === "update" || kind === "remove") {
      this.root.appendChild(this.buildErrorTypeSelect());
    }

    this.message = doc.createElement("p");
    this.message.className = "dialog-message";
    this.root.appendChild(this.message);

    const submit = doc.createElement("button");
    submit.className = "dialog-submit";
    submit.textContent = "apply";
    submit.addEventListener("click", () => void this.submit());
    this.root.appendChild(submit);
  }

  private buildFieldInput(field: (typeof EDITABLE_FIELDS)[number]): HTMLElement {
    const wrapper = this.doc.createElement("label");
    wrapper.textContent = field;
    const input = this.doc.createElement("input");
    input.name = field;
    input.value = this.record[field] ?? "";
    input.addEventListener("input", () => {
      if (input.value !== (this.record[field] ?? "")) {
        this.draft.payload[field] = input.value;
      } else {
        delete this.draft.payload[field];
      }
    });
    wrapper.appendChild(input);
    return wrapper;
  }

  private buildErrorTypeSelect(): HTMLElement {
    const wrapper = this.doc.createElement("label");
    wrapper.textContent = "error type (required)";
    const select = this.doc.createElement("select");
    select.name = "error_type";
    const blank = this.doc.createElement("option");
    blank.value = "";
    blank.textContent = "select...";
    select.appendChild(blank);
    for (const errorType of ERROR_TYPES) {
      const option = this.doc.createElement("option");
      option.value = errorType;
      option.textContent = errorType;
      select.appendChild(option);
    }
    select.addEventListener("change", () => {
      this.draft.errorType = (select.value || null) as ErrorType | null;
    });
    wrapper.appendChild(select);
    return wrapper;
  }

  get isOpen(): boolean {
    return this.root.isConnected;
  }

  /** Submit the draft. Blocked client-side unless the draft is complete. */
  async submit(): Promise<boolean> {
    const blocked = draftBlockReason(this.draft);
    if (blocked) {
      this.message.textContent = blocked;
      this.root.classList.add("blocked");
      return false;
    }
    try {
      await this.client.applyAction(this.record.record_id, this.draft.kind, {
        user: this.draft.user,
        error_type: this.draft.errorType ?? undefined,
        payload:
          this.draft.kind === "update" ? { ...this.draft.payload } : undefined,
      });
    } catch (error) {
      // conflict/forbidden responses keep the dialog open with the server text
      this.message.textContent =
        error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
      return false;
    }
    this.root.remove();
    this.callbacks.onApplied();
    return true;
  }
}
