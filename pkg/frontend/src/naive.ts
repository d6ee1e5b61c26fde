/**
 * The reference naive agent, reimplemented from the parity procedure in
 * docs/protocol.md: random pig, random branch of the two closed-form
 * release solutions, fixed per-bird tap fraction.  No scene geometry
 * beyond the trajectory solver; this client exercises the protocol, not
 * the physics.
 */

import { ClientSession, ServerSideError } from "./client.js";
import { Minstd } from "./minstd.js";

interface PerceptObject {
  id: string;
  kind: string;
  bounds: [number, number, number, number];
}

interface Percept {
  objects: PerceptObject[];
  current_bird: string | null;
  level_state: string;
}

export interface Shot {
  angleDeg: number;
  speedFraction: number;
  tapMs: number;
}

const TAP_FRACTIONS: Record<string, number> = {
  red: 0.0,
  blue: 0.75,
  yellow: 0.85,
  black: 0.98,
  white: 0.8,
};

interface Branch {
  angle: number;
  dx: number;
}

function boundsCenter(
  bounds: [number, number, number, number],
  scale: number,
  screenH: number,
): [number, number] {
  const x0 = bounds[0] / scale;
  const y0 = (screenH - bounds[3]) / scale;
  const x1 = bounds[2] / scale;
  const y1 = (screenH - bounds[1]) / scale;
  return [(x0 + x1) * 0.5, (y0 + y1) * 0.5];
}

function solveBranches(v: number, g: number, dx: number, dy: number): Branch[] {
  if (dx <= 0) {
    return [];
  }
  const v2 = v * v;
  const disc = v2 * v2 - g * (g * dx * dx + 2.0 * dy * v2);
  if (disc < 0.0) {
    return [];
  }
  const root = Math.sqrt(disc);
  const gx = g * dx;
  const out: Branch[] = [];
  for (const angle of [Math.atan((v2 - root) / gx), Math.atan((v2 + root) / gx)]) {
    if (angle >= 0.0 && angle < Math.PI / 2 - 1e-9) {
      out.push({ angle, dx });
    }
  }
  return out;
}

export function naiveSelect(
  percept: Percept,
  rng: Minstd,
  config: Record<string, unknown>,
): Shot {
  const vMax = config.v_max as number;
  const gravity = config.gravity as number;
  const screenW = (config.screen_width as number) ?? 840;
  const screenH = (config.screen_height as number) ?? 480;
  const scale = screenW / (config.world_width as number);

  const sling = percept.objects.find((o) => o.kind === "slingshot");
  if (!sling) {
    throw new Error("percept has no slingshot object");
  }
  const [lx, ly] = boundsCenter(sling.bounds, scale, screenH);
  const pigs = percept.objects
    .filter((o) => o.kind === "pig")
    .sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0));
  if (pigs.length === 0) {
    throw new Error("no living pigs to target");
  }
  const centers = new Map(pigs.map((p) => [p.id, boundsCenter(p.bounds, scale, screenH)]));

  let pig = pigs[rng.randrange(pigs.length)];
  let [tx, ty] = centers.get(pig.id)!;
  let branches = solveBranches(vMax, gravity, tx - lx, ty - ly);
  if (branches.length === 0) {
    // Nearest reachable pig's flattest solution; no extra draw.
    const ordered = [...pigs].sort((a, b) => {
      const [ax, ay] = centers.get(a.id)!;
      const [bx, by] = centers.get(b.id)!;
      const da = Math.hypot(ax - lx, ay - ly);
      const db = Math.hypot(bx - lx, by - ly);
      if (da !== db) {
        return da - db;
      }
      return a.id < b.id ? -1 : 1;
    });
    for (const candidate of ordered) {
      const [cx, cy] = centers.get(candidate.id)!;
      const solved = solveBranches(vMax, gravity, cx - lx, cy - ly);
      if (solved.length > 0) {
        pig = candidate;
        branches = solved.slice(0, 1);
        break;
      }
    }
    if (branches.length === 0) {
      return { angleDeg: 45.0, speedFraction: 1.0, tapMs: 0 };
    }
  }
  let branch: Branch;
  if (branches.length === 2) {
    branch = branches[rng.randrange(2)];
  } else {
    branch = branches[0];
  }
  const bird = percept.current_bird ?? "red";
  const fraction = TAP_FRACTIONS[bird] ?? 0.0;
  let tapMs = 0;
  if (fraction > 0.0) {
    const t = branch.dx / (vMax * Math.cos(branch.angle));
    tapMs = Math.floor(fraction * t * 1000.0 + 0.5);
  }
  return {
    angleDeg: branch.angle * (180.0 / Math.PI),
    speedFraction: 1.0,
    tapMs,
  };
}

export async function playNaive(
  session: ClientSession,
  rngSeed: number,
  levelIndex = 0,
  maxAttempts = 10,
): Promise<Record<string, unknown>> {
  const rng = new Minstd(rngSeed);
  try {
    await session.loadLevel(levelIndex);
    let attempts = 1;
    for (;;) {
      const percept = (await session.getState()) as unknown as Percept;
      const state = percept.level_state;
      if (state === "solved") {
        break;
      }
      if (state === "lost") {
        if (attempts >= maxAttempts) {
          break;
        }
        attempts += 1;
        await session.restartLevel();
        continue;
      }
      const shot = naiveSelect(percept, rng, session.config);
      await session.shoot(shot.angleDeg, shot.speedFraction, shot.tapMs);
    }
  } catch (err) {
    if (!(err instanceof ServerSideError && err.code === "round_closed")) {
      throw err;
    }
  }
  return session.myScore();
}
