// Canonical serialization of layout documents: fixed key order, numbers
// with at most 4 decimal places, compact separators, trailing newline.
// Matches the grounding engine's own serializer byte for byte on equal
// data, so converted files diff cleanly against engine output.

import type { BBox, CanonicalDocument } from "./types.js";

export function formatNumber(x: number): string {
  if (!Number.isFinite(x)) {
    throw new Error(`non-finite number not serializable: ${x}`);
  }
  const q = Math.round(x * 10000) / 10000;
  if (Number.isInteger(q)) return String(q === 0 ? 0 : q);
  let s = q.toFixed(4);
  s = s.replace(/0+$/, "");
  return s;
}

function bbox(b: BBox): string {
  return `[${b.map(formatNumber).join(",")}]`;
}

function str(s: string): string {
  return JSON.stringify(s);
}

export function serializeCanonical(doc: CanonicalDocument): string {
  const parts: string[] = [];
  parts.push("{");
  parts.push(`"doc_id":${str(doc.doc_id)}`);
  parts.push(`,"page_width":${formatNumber(doc.page_width)}`);
  parts.push(`,"page_height":${formatNumber(doc.page_height)}`);
  parts.push(`,"image_path":${doc.image_path === null ? "null" : str(doc.image_path)}`);
  parts.push(`,"blocks":[`);
  doc.blocks.forEach((block, bi) => {
    if (bi) parts.push(",");
    parts.push(`{"id":${str(block.id)},"bbox":${bbox(block.bbox)},"text":${str(block.text)},"lines":[`);
    block.lines.forEach((line, li) => {
      if (li) parts.push(",");
      parts.push(`{"id":${str(line.id)},"bbox":${bbox(line.bbox)},"text":${str(line.text)},"words":[`);
      line.words.forEach((word, wi) => {
        if (wi) parts.push(",");
        parts.push(`{"id":${str(word.id)},"bbox":${bbox(word.bbox)},"text":${str(word.text)}}`);
      });
      parts.push("]}");
    });
    parts.push("]}");
  });
  parts.push("]}");
  parts.push("\n");
  return parts.join("");
}
