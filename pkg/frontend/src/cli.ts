#!/usr/bin/env node
/** naive-client: play a seeded naive round against a birdbench server. */

import { ClientSession } from "./client.js";
import { playNaive } from "./naive.js";

function arg(name: string, fallback: string): string {
  const idx = process.argv.indexOf(`--${name}`);
  return idx >= 0 && idx + 1 < process.argv.length ? process.argv[idx + 1] : fallback;
}

async function main(): Promise<void> {
  const host = arg("host", "127.0.0.1");
  const port = Number(arg("port", "2004"));
  const seed = Number(arg("seed", "0"));
  const level = Number(arg("level", "0"));
  const agentId = arg("agent-id", `naive-ts-${seed}`);
  const session = await ClientSession.connect(host, port, agentId);
  try {
    const score = await playNaive(session, seed, level);
    console.log(JSON.stringify(score));
  } finally {
    session.close();
  }
}

main().catch((err) => {
  console.error(String(err));
  process.exit(1);
});
