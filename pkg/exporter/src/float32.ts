/**
 * 32-bit float helpers.
 *
 * The verifier compares float32 inputs against float32 thresholds, while
 * scikit-learn stores float64 thresholds.  Rounding a threshold to the
 * nearest float32 can flip a decision (x <= t but x > round32(t)), so
 * thresholds are floored instead: floorToFloat32(t) is the largest float32
 * f with (x <= f) === (x <= t) for every float32 x.
 */

const view = new DataView(new ArrayBuffer(4));

/** The next float32 below x (toward -Infinity). */
export function prevFloat32(x: number): number {
  if (Number.isNaN(x) || x === -Infinity) return x;
  view.setFloat32(0, x);
  let bits = view.getUint32(0);
  if (x > 0) {
    bits -= 1;
  } else if (x < 0) {
    bits += 1;
  } else {
    bits = 0x80000001; // -min subnormal
  }
  view.setUint32(0, bits);
  return view.getFloat32(0);
}

export function floorToFloat32(t: number): number {
  let f = Math.fround(t);
  if (f > t) f = prevFloat32(f);
  return f;
}

export function roundToFloat32(x: number): number {
  return Math.fround(x);
}
