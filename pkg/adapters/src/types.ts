// Canonical layout document shape consumed by the grounding engine.

export type BBox = [number, number, number, number]; // x0, y0, x1, y1 in pixels

export interface CanonicalWord {
  id: string;
  bbox: BBox;
  text: string;
}

export interface CanonicalLine {
  id: string;
  bbox: BBox;
  text: string;
  words: CanonicalWord[];
}

export interface CanonicalBlock {
  id: string;
  bbox: BBox;
  text: string;
  lines: CanonicalLine[];
}

export interface CanonicalDocument {
  doc_id: string;
  page_width: number;
  page_height: number;
  image_path: string | null;
  blocks: CanonicalBlock[];
}

// Vendor payloads. engine_a nests pages > blocks > lines > words with
// geometry normalized to [0, 1]; engine_b is a flat pixel-coordinate
// export with explicit line text.

export type VendorId = "engine_a" | "engine_b";

export interface EngineAWord {
  value: string;
  geometry: [[number, number], [number, number]];
  confidence?: number;
}

export interface EngineALine {
  geometry: [[number, number], [number, number]];
  words: EngineAWord[];
}

export interface EngineABlock {
  geometry: [[number, number], [number, number]];
  lines: EngineALine[];
}

export interface EngineAExport {
  pages: {
    dimensions: [number, number]; // height, width
    blocks: EngineABlock[];
  }[];
}

export interface EngineBWord {
  text: string;
  bbox: BBox;
}

export interface EngineBLine {
  text: string;
  bbox: BBox;
  words: EngineBWord[];
}

export interface EngineBRegion {
  bbox: BBox;
  lines: EngineBLine[];
}

export interface EngineBExport {
  image_bbox: BBox;
  regions: EngineBRegion[];
}

export class AdapterError extends Error {}
