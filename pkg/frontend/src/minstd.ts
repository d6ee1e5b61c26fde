/**
 * MINSTD (Park-Miller) generator, as specified in docs/protocol.md for
 * seeded cross-implementation parity runs. All intermediates stay below
 * 2^53 so plain doubles are exact.
 */

const MODULUS = 2147483647; // 2**31 - 1
const MULTIPLIER = 16807;

export class Minstd {
  state: number;

  constructor(seed: number) {
    this.state = (Math.trunc(seed) % (MODULUS - 1)) + 1;
  }

  nextInt(): number {
    this.state = (this.state * MULTIPLIER) % MODULUS;
    return this.state;
  }

  randrange(n: number): number {
    if (n <= 0) {
      throw new Error("randrange needs a positive bound");
    }
    return this.nextInt() % n;
  }
}
