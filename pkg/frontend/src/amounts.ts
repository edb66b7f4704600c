/**
 * Exact, display-only helpers for service amounts.
 *
 * The console never computes prices, utilities, or fairness data itself —
 * every displayed number is a verbatim service string. The two operations
 * here are presentation decisions: ordering two amounts (for delta badges
 * and bar scaling) and an optional rounded *display* of an exact amount.
 * Both run on bigints, so no floating point sneaks in.
 */

export interface Rational {
  num: bigint;
  den: bigint; // always positive
}

export function parseAmount(text: string): Rational {
  const trimmed = text.trim();
  if (trimmed.includes("/")) {
    const [rawNum, rawDen] = trimmed.split("/", 2);
    const num = BigInt(rawNum);
    const den = BigInt(rawDen);
    if (den === 0n) throw new Error(`zero denominator in ${text}`);
    return den < 0n ? { num: -num, den: -den } : { num, den };
  }
  const negative = trimmed.startsWith("-");
  const body = negative ? trimmed.slice(1) : trimmed;
  const [whole, frac = ""] = body.split(".", 2);
  const digits = (whole || "0") + frac;
  const num = BigInt(digits) * (negative ? -1n : 1n);
  return { num, den: 10n ** BigInt(frac.length) };
}

/** -1, 0, or 1 as a < b, a = b, a > b. */
export function compareAmounts(a: string, b: string): number {
  const ra = parseAmount(a);
  const rb = parseAmount(b);
  const left = ra.num * rb.den;
  const right = rb.num * ra.den;
  if (left < right) return -1;
  if (left > right) return 1;
  return 0;
}

export function isNegative(a: string): boolean {
  return parseAmount(a).num < 0n;
}

/**
 * Rounded decimal rendering (half away from zero) for the display toggle.
 * The exact string stays the source of truth; this is cosmetic only.
 */
export function roundedDisplay(a: string, places: number): string {
  const { num, den } = parseAmount(a);
  const scale = 10n ** BigInt(places);
  const scaled = num * scale;
  let q = scaled / den;
  const r = scaled % den;
  if (2n * (r < 0n ? -r : r) >= den) {
    q += num < 0n ? -1n : 1n;
  }
  const negative = q < 0n;
  const digits = (negative ? -q : q).toString().padStart(places + 1, "0");
  const whole = digits.slice(0, digits.length - places) || "0";
  const frac = places > 0 ? `.${digits.slice(digits.length - places)}` : "";
  return `${negative ? "-" : ""}${whole}${frac}`;
}

/** Bar lengths for the utility chart: largest magnitude maps to 100. */
export function barWidths(amounts: string[]): number[] {
  const parsed = amounts.map(parseAmount);
  let top = 1n;
  let topDen = 1n;
  for (const { num, den } of parsed) {
    const mag = num < 0n ? -num : num;
    if (mag * topDen > top * den) {
      top = mag;
      topDen = den;
    }
  }
  return parsed.map(({ num, den }) => {
    const mag = num < 0n ? -num : num;
    // (mag/den) / (top/topDen) * 100, floored to an integer percent
    return Number((mag * topDen * 100n) / (top * den));
  });
}
