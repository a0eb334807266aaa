#!/usr/bin/env node
// Subcommands:
//   convert --vendor {engine_a,engine_b} --in export.json --page-size WxH --out layout.json
//   predict --layout layout.json --question "..." --endpoint URL --out answer.json
// Exit codes: 0 success, 1 input/conversion/endpoint error, 2 internal error.

import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { basename, dirname } from "node:path";
import { parseArgs } from "node:util";

import { serializeCanonical } from "./canonical.js";
import { convertOcrExport, countItems, type PageSize } from "./convert.js";
import { predictAnswer } from "./predict.js";
import { AdapterError, type CanonicalDocument, type VendorId } from "./types.js";

function parsePageSize(spec: string): PageSize {
  const match = /^(\d+(?:\.\d+)?)x(\d+(?:\.\d+)?)$/.exec(spec);
  if (!match) throw new AdapterError(`--page-size expects WxH (e.g. 1240x1754), got '${spec}'`);
  return { width: Number(match[1]), height: Number(match[2]) };
}

function readJson(path: string): unknown {
  const raw = readFileSync(path, "utf-8");
  try {
    return JSON.parse(raw);
  } catch (err) {
    throw new AdapterError(`malformed JSON in ${path}: ${(err as Error).message}`);
  }
}

function writeOut(path: string, text: string): void {
  mkdirSync(dirname(path) || ".", { recursive: true });
  writeFileSync(path, text, "utf-8");
}

async function cmdConvert(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      vendor: { type: "string" },
      in: { type: "string" },
      "page-size": { type: "string" },
      out: { type: "string" },
      "doc-id": { type: "string" },
    },
  });
  if (!values.vendor || !values.in || !values["page-size"] || !values.out) {
    throw new AdapterError("convert needs --vendor, --in, --page-size and --out");
  }
  if (values.vendor !== "engine_a" && values.vendor !== "engine_b") {
    throw new AdapterError(`unknown vendor '${values.vendor}' (expected engine_a or engine_b)`);
  }
  const page = parsePageSize(values["page-size"]);
  const docId = values["doc-id"] ?? basename(values.out).replace(/\.json$/, "");
  const doc = convertOcrExport(values.vendor as VendorId, readJson(values.in), page, docId);
  writeOut(values.out, serializeCanonical(doc));
  const counts = countItems(doc);
  console.error(
    `converted ${values.in} -> ${values.out} (${counts.blocks} blocks, ${counts.lines} lines, ${counts.words} words)`,
  );
  return 0;
}

async function cmdPredict(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      layout: { type: "string" },
      question: { type: "string" },
      endpoint: { type: "string" },
      out: { type: "string" },
      model: { type: "string" },
      log: { type: "string" },
    },
  });
  if (!values.layout || !values.question || !values.endpoint || !values.out) {
    throw new AdapterError("predict needs --layout, --question, --endpoint and --out");
  }
  const doc = readJson(values.layout) as CanonicalDocument;
  if (!doc || typeof doc.doc_id !== "string" || !Array.isArray(doc.blocks)) {
    throw new AdapterError(`${values.layout} is not a canonical layout document`);
  }
  const outcome = await predictAnswer(doc, values.question, {
    url: values.endpoint,
    model: values.model,
  });
  writeOut(
    values.out,
    JSON.stringify(
      { doc_id: doc.doc_id, question: values.question, answer: outcome.answer },
      null,
      0,
    ) + "\n",
  );
  const logPath = values.log ?? values.out.replace(/\.json$/, "") + ".provenance.jsonl";
  writeOut(
    logPath,
    JSON.stringify({
      endpoint: values.endpoint,
      attempts: outcome.attempts,
      prompt: outcome.prompt,
      response: outcome.rawResponse,
    }) + "\n",
  );
  console.error(`predicted answer written to ${values.out} (provenance: ${logPath})`);
  return 0;
}

export async function main(argv: string[]): Promise<number> {
  const [command, ...rest] = argv;
  try {
    if (command === "convert") return await cmdConvert(rest);
    if (command === "predict") return await cmdPredict(rest);
    console.error("usage: docground-adapters {convert|predict} ...");
    return 1;
  } catch (err) {
    if (err instanceof AdapterError || (err as NodeJS.ErrnoException)?.code === "ENOENT") {
      console.error(`error: ${(err as Error).message}`);
      return 1;
    }
    console.error(`internal error: ${(err as Error).stack ?? err}`);
    return 2;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => process.exit(code));
}
