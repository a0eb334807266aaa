// Vendor OCR exports -> canonical layout documents.
//
// engine_a geometry is normalized to [0, 1] and carries word values
// only, so line and block text are joined from their children.
// engine_b is already pixel-based with explicit line text. Both
// converters keep the vendor's reading order and item counts and
// assign hierarchical ids; geometry outside the page is rejected with
// the offending ids listed.

import {
  AdapterError,
  type BBox,
  type CanonicalBlock,
  type CanonicalDocument,
  type CanonicalLine,
  type CanonicalWord,
  type EngineAExport,
  type EngineBExport,
  type VendorId,
} from "./types.js";

export interface PageSize {
  width: number;
  height: number;
}

function round4(x: number): number {
  return Math.round(x * 10000) / 10000;
}

function pad2(n: number): string {
  return n.toString().padStart(2, "0");
}

function checkBBox(b: unknown, context: string): BBox {
  if (!Array.isArray(b) || b.length !== 4 || b.some((v) => typeof v !== "number" || !Number.isFinite(v))) {
    throw new AdapterError(`${context}: bbox must be four finite numbers`);
  }
  const [x0, y0, x1, y1] = b as number[];
  if (x0 >= x1 || y0 >= y1) {
    throw new AdapterError(`${context}: bbox has no area: [${b.join(",")}]`);
  }
  return [x0, y0, x1, y1];
}

function ensureInsidePage(doc: CanonicalDocument, slack = 2): void {
  const outside: string[] = [];
  const check = (id: string, b: BBox) => {
    if (b[0] < -slack || b[1] < -slack || b[2] > doc.page_width + slack || b[3] > doc.page_height + slack) {
      outside.push(id);
    }
  };
  for (const block of doc.blocks) {
    check(block.id, block.bbox);
    for (const line of block.lines) {
      check(line.id, line.bbox);
      for (const word of line.words) check(word.id, word.bbox);
    }
  }
  if (outside.length) {
    throw new AdapterError(`geometry outside the page for: ${outside.join(", ")}`);
  }
}

function convertEngineA(payload: EngineAExport, page: PageSize, docId: string): CanonicalDocument {
  if (!payload || !Array.isArray(payload.pages) || payload.pages.length !== 1) {
    throw new AdapterError("engine_a export must contain exactly one page");
  }
  const scale = ([[x0, y0], [x1, y1]]: [[number, number], [number, number]], context: string): BBox => {
    for (const v of [x0, y0, x1, y1]) {
      if (typeof v !== "number" || !Number.isFinite(v) || v < 0 || v > 1) {
        throw new AdapterError(`${context}: normalized geometry must lie in [0, 1]`);
      }
    }
    return checkBBox(
      [round4(x0 * page.width), round4(y0 * page.height), round4(x1 * page.width), round4(y1 * page.height)],
      context,
    );
  };

  const blocks: CanonicalBlock[] = payload.pages[0].blocks.map((blockRaw, bi) => {
    const blockId = `${docId}-b${pad2(bi)}`;
    if (!blockRaw.geometry || !Array.isArray(blockRaw.lines)) {
      throw new AdapterError(`${blockId}: block needs geometry and lines`);
    }
    const lines: CanonicalLine[] = blockRaw.lines.map((lineRaw, li) => {
      const lineId = `${blockId}-l${pad2(li)}`;
      const words: CanonicalWord[] = (lineRaw.words ?? []).map((wordRaw, wi) => {
        const wordId = `${lineId}-w${pad2(wi)}`;
        if (typeof wordRaw.value !== "string" || !wordRaw.value.trim()) {
          throw new AdapterError(`${wordId}: word value missing or empty`);
        }
        return { id: wordId, bbox: scale(wordRaw.geometry, wordId), text: wordRaw.value };
      });
      if (!words.length) {
        throw new AdapterError(`${lineId}: line has no words`);
      }
      return {
        id: lineId,
        bbox: scale(lineRaw.geometry, lineId),
        text: words.map((w) => w.text).join(" "),
        words,
      };
    });
    return {
      id: blockId,
      bbox: scale(blockRaw.geometry, blockId),
      text: lines.map((l) => l.text).join(" "),
      lines,
    };
  });
  return {
    doc_id: docId,
    page_width: page.width,
    page_height: page.height,
    image_path: null,
    blocks,
  };
}

function convertEngineB(payload: EngineBExport, page: PageSize, docId: string): CanonicalDocument {
  if (!payload || !Array.isArray(payload.regions)) {
    throw new AdapterError("engine_b export must contain a regions array");
  }
  const blocks: CanonicalBlock[] = payload.regions.map((regionRaw, bi) => {
    const blockId = `${docId}-b${pad2(bi)}`;
    const lines: CanonicalLine[] = (regionRaw.lines ?? []).map((lineRaw, li) => {
      const lineId = `${blockId}-l${pad2(li)}`;
      if (typeof lineRaw.text !== "string" || !lineRaw.text.trim()) {
        throw new AdapterError(`${lineId}: line text missing or empty`);
      }
      const words: CanonicalWord[] = (lineRaw.words ?? []).map((wordRaw, wi) => {
        const wordId = `${lineId}-w${pad2(wi)}`;
        if (typeof wordRaw.text !== "string" || !wordRaw.text.trim()) {
          throw new AdapterError(`${wordId}: word text missing or empty`);
        }
        return { id: wordId, bbox: checkBBox(wordRaw.bbox, wordId), text: wordRaw.text };
      });
      if (!words.length) {
        throw new AdapterError(`${lineId}: line has no words`);
      }
      return { id: lineId, bbox: checkBBox(lineRaw.bbox, lineId), text: lineRaw.text, words };
    });
    return {
      id: blockId,
      bbox: checkBBox(regionRaw.bbox, blockId),
      text: lines.map((l) => l.text).join(" "),
      lines,
    };
  });
  return {
    doc_id: docId,
    page_width: page.width,
    page_height: page.height,
    image_path: null,
    blocks,
  };
}

export function convertOcrExport(
  vendor: VendorId,
  payload: unknown,
  page: PageSize,
  docId: string,
): CanonicalDocument {
  if (!Number.isFinite(page.width) || !Number.isFinite(page.height) || page.width <= 0 || page.height <= 0) {
    throw new AdapterError(`page size must be positive, got ${page.width}x${page.height}`);
  }
  let doc: CanonicalDocument;
  if (vendor === "engine_a") {
    doc = convertEngineA(payload as EngineAExport, page, docId);
  } else if (vendor === "engine_b") {
    doc = convertEngineB(payload as EngineBExport, page, docId);
  } else {
    throw new AdapterError(`unknown vendor '${vendor}' (expected engine_a or engine_b)`);
  }
  ensureInsidePage(doc);
  return doc;
}

export function countItems(doc: CanonicalDocument): { blocks: number; lines: number; words: number } {
  let lines = 0;
  let words = 0;
  for (const block of doc.blocks) {
    lines += block.lines.length;
    for (const line of block.lines) words += line.words.length;
  }
  return { blocks: doc.blocks.length, lines, words };
}
