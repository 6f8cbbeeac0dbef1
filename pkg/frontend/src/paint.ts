/** Client-side paint raster mirroring the server's deposition math.
 *
 * The raster is float64 RGB with white = 1.0, stored row-major with row 0 at
 * the top of the image. World coordinates are y-up, so a stamp at world row
 * rb lands on image row heightPx - 1 - rb. Every floating-point operation
 * here matches the server's order and rounding, which is what makes the
 * delta-rendered canvas byte-identical to the server's PNG.
 */
import type { SessionConfig, Stamp } from './protocol.js';

/** Python-style round-half-to-even for non-negative values. */
function roundHalfEven(value: number): number {
    const base = Math.floor(value);
    const diff = value - base;
    if (diff > 0.5) return base + 1;
    if (diff < 0.5) return base;
    return base % 2 === 0 ? base : base + 1;
}

export class PaintModel {
    readonly widthPx: number;
    readonly heightPx: number;
    readonly scale: number;
    readonly strength: number;
    readonly rgb: Float64Array;

    constructor(
        size: readonly [number, number],
        pixelsPerUnit = 2.0,
        trailStrength = 0.08,
    ) {
        this.scale = pixelsPerUnit;
        this.strength = trailStrength;
        this.widthPx = roundHalfEven(size[0] * this.scale);
        this.heightPx = roundHalfEven(size[1] * this.scale);
        if (this.widthPx < 1 || this.heightPx < 1) {
            throw new Error('canvas raster collapsed to zero pixels');
        }
        this.rgb = new Float64Array(this.heightPx * this.widthPx * 3).fill(1.0);
    }

    static fromConfig(config: SessionConfig): PaintModel {
        return new PaintModel(
            config.canvas_size, config.pixels_per_unit, config.trail_strength);
    }

    /** Darken a disc of the given diameter (world units) centred at (x, y). */
    deposit(x: number, y: number, width: number,
            alpha: readonly [number, number, number]): void {
        const s = this.scale;
        const cx = x * s;
        const cy = y * s;
        const r = width * s / 2.0;
        const c0 = Math.max(0, Math.floor(cx - r - 1.0));
        const c1 = Math.min(this.widthPx - 1, Math.ceil(cx + r + 1.0));
        const rb0 = Math.max(0, Math.floor(cy - r - 1.0));
        const rb1 = Math.min(this.heightPx - 1, Math.ceil(cy + r + 1.0));
        if (c0 > c1 || rb0 > rb1) return;
        const rr = r * r;
        for (let rb = rb0; rb <= rb1; rb++) {
            const dy = rb + 0.5 - cy;
            const rowBase = (this.heightPx - 1 - rb) * this.widthPx;
            for (let c = c0; c <= c1; c++) {
                const dx = c + 0.5 - cx;
                if (dy * dy + dx * dx > rr) continue;
                const pixel = (rowBase + c) * 3;
                for (let pigment = 0; pigment < 3; pigment++) {
                    const a = alpha[pigment];
                    if (a <= 0.0) continue;
                    const factor = 1.0 - this.strength * a;
                    const value = this.rgb[pixel + pigment] * factor;
                    this.rgb[pixel + pigment] =
                        Math.min(1.0, Math.max(0.0, value));
                }
            }
        }
    }

    /** Replay wire stamps ([robot, x, y, width, aC, aM, aY]) in order. */
    applyStamps(stamps: readonly Stamp[]): void {
        for (const [, x, y, width, aC, aM, aY] of stamps) {
            this.deposit(x, y, width, [aC, aM, aY]);
        }
    }

    /** Reset the raster from 8-bit pixels (keyframe resync). */
    setFromRgb8(pixels: Uint8Array): void {
        if (pixels.length !== this.rgb.length) {
            throw new Error('pixel buffer does not match raster shape');
        }
        for (let i = 0; i < pixels.length; i++) {
            this.rgb[i] = pixels[i] / 255.0;
        }
    }

    /** Quantize to 8-bit with floor(x * 255 + 0.5), matching the server. */
    toRgb8(): Uint8Array {
        const out = new Uint8Array(this.rgb.length);
        for (let i = 0; i < this.rgb.length; i++) {
            out[i] = Math.floor(this.rgb[i] * 255.0 + 0.5);
        }
        return out;
    }
}
