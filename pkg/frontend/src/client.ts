/**
 * Minimal TCP client session: newline-delimited JSON, one request in
 * flight at a time, strictly increasing seq.
 */

import { Socket, createConnection } from "net";

import { encodeRequest, WireValue } from "./wire.js";

export class ServerSideError extends Error {
  code: string;

  constructor(code: string, message: string) {
    super(`${code}: ${message}`);
    this.code = code;
  }
}

interface Response {
  seq: unknown;
  ok: boolean;
  data?: Record<string, unknown>;
  error?: { code: string; message: string };
}

export class ClientSession {
  private socket: Socket;
  private buffer = "";
  private pending: Array<(line: string) => void> = [];
  private seq = 0;
  readonly agentId: string;
  readonly record: string[] = [];
  config!: Record<string, unknown>;

  private constructor(socket: Socket, agentId: string) {
    this.socket = socket;
    this.agentId = agentId;
    socket.setEncoding("utf-8");
    socket.on("data", (chunk: string) => {
      this.buffer += chunk;
      let idx;
      while ((idx = this.buffer.indexOf("\n")) >= 0 && this.pending.length > 0) {
        const line = this.buffer.slice(0, idx);
        this.buffer = this.buffer.slice(idx + 1);
        const resolve = this.pending.shift()!;
        resolve(line);
      }
    });
  }

  static async connect(host: string, port: number, agentId: string): Promise<ClientSession> {
    const socket = await new Promise<Socket>((resolve, reject) => {
      const s = createConnection({ host, port }, () => {
        s.removeListener("error", reject);
        resolve(s);
      });
      s.once("error", reject);
    });
    const session = new ClientSession(socket, agentId);
    session.config = await session.request("HELLO", [["agent_id", agentId]]);
    return session;
  }

  private readLine(): Promise<string> {
    return new Promise((resolve) => {
      this.pending.push(resolve);
      // flush anything already buffered
      const idx = this.buffer.indexOf("\n");
      if (idx >= 0 && this.pending.length === 1) {
        const line = this.buffer.slice(0, idx);
        this.buffer = this.buffer.slice(idx + 1);
        this.pending.shift()!(line);
      }
    });
  }

  async request(op: string, args: Array<[string, WireValue]>): Promise<Record<string, unknown>> {
    this.seq += 1;
    const line = encodeRequest(op, args, this.seq);
    this.record.push(line);
    const replyPromise = this.readLine();
    this.socket.write(line + "\n");
    const reply = await replyPromise;
    const resp = JSON.parse(reply) as Response;
    if (resp.seq !== this.seq) {
      throw new Error(`response out of order: sent seq ${this.seq}, got ${resp.seq}`);
    }
    if (!resp.ok) {
      const err = resp.error ?? { code: "unknown", message: "" };
      throw new ServerSideError(err.code, err.message);
    }
    return resp.data ?? {};
  }

  loadLevel(index: number) {
    return this.request("LOAD_LEVEL", [["index", index]]);
  }

  restartLevel() {
    return this.request("RESTART_LEVEL", []);
  }

  getState() {
    return this.request("GET_STATE", []);
  }

  shoot(angleDeg: number, speedFraction: number, tapMs: number) {
    return this.request("SHOOT", [
      ["angle_deg", angleDeg],
      ["speed_fraction", speedFraction],
      ["tap_ms", tapMs],
    ]);
  }

  myScore() {
    return this.request("GET_MY_SCORE", []);
  }

  close(): void {
    this.socket.destroy();
  }
}
