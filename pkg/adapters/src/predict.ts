// Answer prediction over a converted layout: the blocks' text in
// reading order plus the question go to a chat-completion endpoint;
// the model's reply is returned verbatim. Transient endpoint failures
// are retried with exponential backoff; an empty reply is an error so
// nothing downstream ever grounds an empty string.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { AdapterError, type CanonicalDocument } from "./types.js";

export interface EndpointConfig {
  url: string;
  model?: string;
  apiKey?: string; // falls back to ADAPTER_API_KEY
  attempts?: number;
  backoffMs?: number;
}

export interface PredictionOutcome {
  answer: string;
  prompt: string;
  rawResponse: string;
  attempts: number;
}

const TEMPLATE_PATH = join(dirname(fileURLToPath(import.meta.url)), "..", "templates", "prompt.txt");

export function loadTemplate(): string {
  return readFileSync(TEMPLATE_PATH, "utf-8");
}

export function buildPrompt(doc: CanonicalDocument, question: string, template?: string): string {
  const context = doc.blocks.map((b, i) => `[${i + 1}] ${b.text}`).join("\n");
  return (template ?? loadTemplate())
    .replaceAll("{context}", context)
    .replaceAll("{question}", question);
}

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

export async function predictAnswer(
  doc: CanonicalDocument,
  question: string,
  endpoint: EndpointConfig,
): Promise<PredictionOutcome> {
  const prompt = buildPrompt(doc, question);
  const apiKey = endpoint.apiKey ?? process.env.ADAPTER_API_KEY;
  const headers: Record<string, string> = { "Content-Type": "application/json" };
  if (apiKey) headers["Authorization"] = `Bearer ${apiKey}`;
  const body = JSON.stringify({
    model: endpoint.model ?? "default",
    messages: [{ role: "user", content: prompt }],
  });

  const maxAttempts = endpoint.attempts ?? 3;
  let backoff = endpoint.backoffMs ?? 250;
  let lastError = "";
  for (let attempt = 1; attempt <= maxAttempts; attempt++) {
    try {
      const response = await fetch(endpoint.url, { method: "POST", headers, body });
      const raw = await response.text();
      if (!response.ok) {
        lastError = `endpoint returned ${response.status}: ${raw.slice(0, 200)}`;
      } else {
        let answer: unknown;
        try {
          const parsed = JSON.parse(raw);
          answer = parsed?.choices?.[0]?.message?.content;
        } catch {
          throw new AdapterError(`endpoint returned non-JSON body: ${raw.slice(0, 200)}`);
        }
        if (typeof answer !== "string") {
          throw new AdapterError("endpoint response carries no message content");
        }
        if (!answer.trim()) {
          throw new AdapterError("model returned an empty answer; refusing to ground an empty string");
        }
        return { answer, prompt, rawResponse: raw, attempts: attempt };
      }
    } catch (err) {
      if (err instanceof AdapterError) throw err; // malformed/empty replies are not retried
      lastError = err instanceof Error ? err.message : String(err);
    }
    if (attempt < maxAttempts) {
      await sleep(backoff);
      backoff *= 2;
    }
  }
  throw new AdapterError(`endpoint failed after ${maxAttempts} attempts: ${lastError}`);
}
