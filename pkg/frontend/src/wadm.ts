// Read-side adapter from Web Annotation documents to the flat shape
// the panels edit. The annotation body is an XML island inside a
// TextualBody; DOMParser handles the escaping rules.

import { Rgb, WadmDoc } from "./types";

export interface AnnotationView {
  id: string; // bare uuid, "urn:uuid:" stripped
  title: string;
  description: string;
  color: Rgb;
  faces: number[];
  fields: [string, string][];
  schemaName: string; // "" when the record carries no schema
  schemaVersion: number;
  created: string;
  modified: string;
  creator: string;
}

function textOf(root: Element, tag: string): string {
  const el = root.getElementsByTagName(tag)[0];
  return el?.textContent ?? "";
}

export function parseWadm(doc: WadmDoc): AnnotationView {
  const xml = new DOMParser().parseFromString(doc.body.value, "application/xml");
  const root = xml.documentElement;
  if (!root || root.tagName !== "artemis-body") {
    throw new Error("annotation body is not in the expected XML dialect");
  }

  const colorEl = root.getElementsByTagName("color")[0];
  const color: Rgb = colorEl
    ? [
        Number(colorEl.getAttribute("r")),
        Number(colorEl.getAttribute("g")),
        Number(colorEl.getAttribute("b")),
      ]
    : [255, 0, 0];

  const fields: [string, string][] = [];
  const fieldEls = root.getElementsByTagName("field");
  for (let i = 0; i < fieldEls.length; i++) {
    fields.push([fieldEls[i].getAttribute("key") ?? "", fieldEls[i].textContent ?? ""]);
  }

  const schemaEl = root.getElementsByTagName("schema")[0];

  return {
    id: doc.id.replace(/^urn:uuid:/, ""),
    title: textOf(root, "title"),
    description: textOf(root, "description"),
    color,
    faces: doc.target.selector.faces.slice(),
    fields,
    schemaName: schemaEl?.getAttribute("name") ?? "",
    schemaVersion: Number(schemaEl?.getAttribute("version") ?? 1),
    created: doc.created,
    modified: doc.modified,
    creator: doc.creator,
  };
}
