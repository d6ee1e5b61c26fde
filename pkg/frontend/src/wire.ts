/**
 * Canonical request encoding: fixed key order and number format so the
 * byte stream matches any other conforming client given the same
 * decision sequence (see docs/protocol.md).
 */

export type WireValue = string | number;

export function formatWireNumber(x: number): string {
  if (Number.isInteger(x)) {
    return String(x);
  }
  const q = Math.floor(x * 10000 + 0.5) / 10000;
  return String(q);
}

export function encodeRequest(
  op: string,
  args: Array<[string, WireValue]>,
  seq: number,
): string {
  const parts = args.map(([key, value]) => {
    const encoded = typeof value === "string" ? `"${value}"` : formatWireNumber(value);
    return `"${key}":${encoded}`;
  });
  return `{"op":"${op}","args":{${parts.join(",")}},"seq":${seq}}`;
}
