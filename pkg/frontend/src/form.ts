// Annotation editor form. Validation mirrors the service's field
// rules (number parses as a float, date is a strict YYYY-MM-DD
// calendar date, enum by membership) and renders violations inline
// next to the offending field; the save button stays disabled while
// anything is invalid. The service remains authoritative: a 422 from
// save lands back on the same rows via applyServerViolations.

import { AnnotationPayload, FieldKind, Rgb, SchemaDict } from "./types";
import { AnnotationView } from "./wadm";

export function rgbToHex([r, g, b]: Rgb): string {
  const h = (c: number) => c.toString(16).padStart(2, "0");
  return `#${h(r)}${h(g)}${h(b)}`;
}

export function hexToRgb(hex: string): Rgb {
  const m = /^#?([0-9a-f]{6})$/i.exec(hex);
  if (!m) throw new Error(`not a hex color: ${hex}`);
  const n = parseInt(m[1], 16);
  return [(n >> 16) & 255, (n >> 8) & 255, n & 255];
}

function isValidDate(value: string): boolean {
  const m = /^(\d{4})-(\d{2})-(\d{2})$/.exec(value);
  if (!m) return false;
  const [y, mo, d] = [Number(m[1]), Number(m[2]), Number(m[3])];
  const dt = new Date(Date.UTC(y, mo - 1, d));
  return dt.getUTCFullYear() === y && dt.getUTCMonth() === mo - 1 && dt.getUTCDate() === d;
}

function isValidNumber(value: string): boolean {
  const t = value.trim();
  if (!t) return false;
  // the service parses with float(), which also takes inf/nan spellings
  if (/^[+-]?(inf(inity)?|nan)$/i.test(t)) return true;
  return !Number.isNaN(Number(t));
}

interface FieldRow {
  el: HTMLDivElement;
  key: HTMLInputElement;
  kind: HTMLSelectElement | null; // null in edit mode: the stored schema fixes kinds
  options: HTMLInputElement | null; // comma-separated enum values
  value: HTMLInputElement;
  error: HTMLSpanElement;
}

export interface FormResult {
  payload: AnnotationPayload;
  isEdit: boolean;
  annId: string | null;
}

export interface FormCallbacks {
  onSave: (result: FormResult) => void;
  onCancel: () => void;
  // pulls the latest service-returned selection for the faces field
  currentSelection: () => number[];
}

const KINDS: FieldKind[] = ["text", "number", "date", "enum"];

export class AnnotationForm {
  readonly el: HTMLFormElement;
  private titleInput: HTMLInputElement;
  private colorInput: HTMLInputElement;
  private descInput: HTMLTextAreaElement;
  private creatorInput: HTMLInputElement;
  private facesLabel: HTMLSpanElement;
  private schemaNameInput: HTMLInputElement | null = null;
  private schemaVersionInput: HTMLInputElement | null = null;
  private rowsHost: HTMLDivElement;
  private rows: FieldRow[] = [];
  private saveBtn: HTMLButtonElement;
  private formError: HTMLSpanElement;
  private faces: number[];
  private editing: AnnotationView | null;

  constructor(private callbacks: FormCallbacks, editing: AnnotationView | null) {
    this.editing = editing;
    this.faces = editing ? editing.faces.slice() : callbacks.currentSelection();

    this.el = document.createElement("form");
    this.el.className = "annotation-form";
    this.el.addEventListener("submit", (ev) => {
      ev.preventDefault();
      this.save();
    });

    const heading = document.createElement("h3");
    heading.textContent = editing ? "Edit annotation" : "New annotation";
    this.el.appendChild(heading);

    this.titleInput = this.labeled("Title", document.createElement("input"));
    this.titleInput.name = "title";
    this.titleInput.value = editing?.title ?? "";

    this.colorInput = this.labeled("Display color", document.createElement("input"));
    this.colorInput.type = "color";
    this.colorInput.name = "color";
    this.colorInput.value = rgbToHex(editing?.color ?? [230, 57, 70]);

    this.descInput = this.labeled("Description", document.createElement("textarea"));
    this.descInput.name = "description";
    this.descInput.value = editing?.description ?? "";

    this.creatorInput = this.labeled("Creator", document.createElement("input"));
    this.creatorInput.name = "creator";
    this.creatorInput.value = editing?.creator ?? "";

    const facesRow = document.createElement("div");
    facesRow.className = "form-row form-faces";
    this.facesLabel = document.createElement("span");
    this.facesLabel.className = "faces-count";
    facesRow.appendChild(this.facesLabel);
    const takeBtn = document.createElement("button");
    takeBtn.type = "button";
    takeBtn.className = "use-selection";
    takeBtn.textContent = "Use current selection";
    takeBtn.addEventListener("click", () => {
      this.faces = this.callbacks.currentSelection();
      this.refreshFaces();
      this.validate();
    });
    facesRow.appendChild(takeBtn);
    this.el.appendChild(facesRow);
    this.refreshFaces();

    // Structured fields. Creating: the form doubles as a schema
    // editor and submits the schema inline. Editing: the stored
    // schema is kept as-is, only values change.
    const fieldsHead = document.createElement("h4");
    fieldsHead.textContent = "Structured fields";
    this.el.appendChild(fieldsHead);

    if (editing && editing.schemaName) {
      const note = document.createElement("p");
      note.className = "schema-note";
      note.textContent = `Schema: ${editing.schemaName} v${editing.schemaVersion}`;
      this.el.appendChild(note);
    } else if (!editing) {
      this.schemaNameInput = this.labeled("Schema name", document.createElement("input"));
      this.schemaNameInput.name = "schema-name";
      this.schemaNameInput.placeholder = "required when fields are present";
      this.schemaVersionInput = this.labeled("Schema version", document.createElement("input"));
      this.schemaVersionInput.name = "schema-version";
      this.schemaVersionInput.type = "number";
      this.schemaVersionInput.value = "1";
    }

    this.rowsHost = document.createElement("div");
    this.rowsHost.className = "field-rows";
    this.el.appendChild(this.rowsHost);
    if (editing) {
      for (const [k, v] of editing.fields) this.addRow(k, v);
    }

    const addBtn = document.createElement("button");
    addBtn.type = "button";
    addBtn.className = "add-field";
    addBtn.textContent = "Add field";
    addBtn.addEventListener("click", () => {
      this.addRow("", "");
      this.validate();
    });
    this.el.appendChild(addBtn);

    this.formError = document.createElement("span");
    this.formError.className = "form-error";
    this.el.appendChild(this.formError);

    const actions = document.createElement("div");
    actions.className = "form-actions";
    this.saveBtn = document.createElement("button");
    this.saveBtn.type = "submit";
    this.saveBtn.className = "save";
    this.saveBtn.textContent = "Save";
    actions.appendChild(this.saveBtn);
    const cancelBtn = document.createElement("button");
    cancelBtn.type = "button";
    cancelBtn.className = "cancel";
    cancelBtn.textContent = "Cancel";
    cancelBtn.addEventListener("click", () => this.callbacks.onCancel());
    actions.appendChild(cancelBtn);
    this.el.appendChild(actions);

    this.el.addEventListener("input", () => this.validate());
    this.validate();
  }

  private labeled<T extends HTMLElement>(text: string, input: T): T {
    const row = document.createElement("label");
    row.className = "form-row";
    const caption = document.createElement("span");
    caption.textContent = text;
    row.appendChild(caption);
    row.appendChild(input);
    this.el.appendChild(row);
    return input;
  }

  private refreshFaces() {
    this.facesLabel.textContent = `Faces: ${this.faces.length}`;
  }

  addRow(key: string, value: string, kind: FieldKind = "text", options = "") {
    const row = document.createElement("div");
    row.className = "field-row";

    const keyInput = document.createElement("input");
    keyInput.className = "field-key";
    keyInput.placeholder = "key";
    keyInput.value = key;
    if (this.editing) keyInput.readOnly = true;
    row.appendChild(keyInput);

    let kindSelect: HTMLSelectElement | null = null;
    let optionsInput: HTMLInputElement | null = null;
    if (!this.editing) {
      kindSelect = document.createElement("select");
      kindSelect.className = "field-kind";
      for (const k of KINDS) {
        const opt = document.createElement("option");
        opt.value = k;
        opt.textContent = k;
        kindSelect.appendChild(opt);
      }
      kindSelect.value = kind;
      row.appendChild(kindSelect);

      optionsInput = document.createElement("input");
      optionsInput.className = "field-options";
      optionsInput.placeholder = "enum values, comma separated";
      optionsInput.value = options;
      row.appendChild(optionsInput);
      const syncOptions = () => {
        optionsInput!.style.display = kindSelect!.value === "enum" ? "" : "none";
      };
      kindSelect.addEventListener("change", syncOptions);
      syncOptions();
    }

    const valueInput = document.createElement("input");
    valueInput.className = "field-value";
    valueInput.placeholder = "value";
    valueInput.value = value;
    row.appendChild(valueInput);

    const error = document.createElement("span");
    error.className = "field-error";
    row.appendChild(error);

    if (!this.editing) {
      const rm = document.createElement("button");
      rm.type = "button";
      rm.className = "remove-field";
      rm.textContent = "×";
      rm.addEventListener("click", () => {
        row.remove();
        this.rows = this.rows.filter((r) => r.el !== row);
        this.validate();
      });
      row.appendChild(rm);
    }

    this.rowsHost.appendChild(row);
    this.rows.push({ el: row, key: keyInput, kind: kindSelect, options: optionsInput, value: valueInput, error });
  }

  private enumValues(row: FieldRow): string[] {
    return (row.options?.value ?? "")
      .split(",")
      .map((s) => s.trim())
      .filter((s) => s.length > 0);
  }

  // Returns true when everything conforms; paints inline errors and
  // toggles the save button either way.
  validate(): boolean {
    let ok = true;
    this.formError.textContent = "";

    if (!this.titleInput.value.trim()) {
      this.formError.textContent = "title is required";
      ok = false;
    } else if (this.faces.length === 0) {
      this.formError.textContent = "select at least one face first";
      ok = false;
    }

    const seen = new Set<string>();
    for (const row of this.rows) {
      let msg = "";
      const key = row.key.value.trim();
      const kind = (row.kind?.value ?? "text") as FieldKind;
      if (!key) {
        msg = "key is required";
      } else if (seen.has(key)) {
        msg = "duplicate key";
      } else {
        seen.add(key);
        if (kind === "enum") {
          const allowed = this.enumValues(row);
          if (allowed.length === 0) {
            msg = "enum needs at least one value";
          } else if (!allowed.includes(row.value.value)) {
            msg = `must be one of: ${allowed.join(", ")}`;
          }
        } else if (kind === "number" && !isValidNumber(row.value.value)) {
          msg = "must be a number";
        } else if (kind === "date" && !isValidDate(row.value.value)) {
          msg = "must be a date (YYYY-MM-DD)";
        }
      }
      row.error.textContent = msg;
      if (msg) ok = false;
    }

    if (ok && this.rows.length > 0 && this.schemaNameInput && !this.schemaNameInput.value.trim()) {
      this.formError.textContent = "schema name is required when fields are present";
      ok = false;
    }

    this.saveBtn.disabled = !ok;
    return ok;
  }

  // The color a live selection should be highlighted with while this
  // form is open.
  displayColor(): Rgb {
    return hexToRgb(this.colorInput.value);
  }

  // Marks rows named by a service-side schema violation (422).
  applyServerViolations(keys: string[]) {
    const keySet = new Set(keys);
    for (const row of this.rows) {
      if (keySet.has(row.key.value.trim())) {
        row.error.textContent = "rejected by the service schema";
      }
    }
    this.saveBtn.disabled = true;
  }

  payload(): AnnotationPayload {
    const payload: AnnotationPayload = {
      title: this.titleInput.value,
      color: hexToRgb(this.colorInput.value),
      description: this.descInput.value,
      creator: this.creatorInput.value,
      faces: this.faces.slice(),
    };
    if (this.rows.length > 0) {
      payload.fields = this.rows.map((r) => [r.key.value.trim(), r.value.value]);
      if (!this.editing) {
        const schema: SchemaDict = {
          name: this.schemaNameInput!.value.trim(),
          version: parseInt(this.schemaVersionInput!.value, 10) || 1,
          entries: this.rows.map((r) => {
            const kind = (r.kind?.value ?? "text") as FieldKind;
            const entry: SchemaDict["entries"][number] = { key: r.key.value.trim(), kind };
            if (kind === "enum") entry.values = this.enumValues(r);
            return entry;
          }),
        };
        payload.schema = schema;
      }
    }
    return payload;
  }

  private save() {
    if (!this.validate()) return;
    this.callbacks.onSave({
      payload: this.payload(),
      isEdit: this.editing !== null,
      annId: this.editing?.id ?? null,
    });
  }
}
