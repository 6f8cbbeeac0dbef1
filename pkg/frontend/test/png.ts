/** Minimal PNG reader for tests: 8-bit RGB, filter 0, as the service emits. */
import { inflateSync } from 'node:zlib';

const PNG_MAGIC = [0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a];

export interface DecodedPng {
    width: number;
    height: number;
    rgb: Uint8Array;
}

export function decodePng(png: Uint8Array): DecodedPng {
    for (let i = 0; i < PNG_MAGIC.length; i++) {
        if (png[i] !== PNG_MAGIC[i]) throw new Error('not a PNG');
    }
    const view = new DataView(png.buffer, png.byteOffset, png.byteLength);
    let offset = 8;
    let width = 0;
    let height = 0;
    const idat: Buffer[] = [];
    while (offset + 8 <= png.length) {
        const length = view.getUint32(offset);
        const tag = String.fromCharCode(
            png[offset + 4], png[offset + 5], png[offset + 6], png[offset + 7]);
        const data = png.subarray(offset + 8, offset + 8 + length);
        if (tag === 'IHDR') {
            width = view.getUint32(offset + 8);
            height = view.getUint32(offset + 12);
            const bitDepth = png[offset + 16];
            const colorType = png[offset + 17];
            if (bitDepth !== 8 || colorType !== 2) {
                throw new Error('expected 8-bit truecolor');
            }
        } else if (tag === 'IDAT') {
            idat.push(Buffer.from(data));
        } else if (tag === 'IEND') {
            break;
        }
        offset += 12 + length;
    }
    if (width === 0 || height === 0) throw new Error('missing IHDR');
    const raw = inflateSync(Buffer.concat(idat));
    const stride = 1 + width * 3;
    if (raw.length !== stride * height) {
        throw new Error(`raw scanline data is ${raw.length} bytes, expected ${stride * height}`);
    }
    const rgb = new Uint8Array(width * height * 3);
    for (let row = 0; row < height; row++) {
        if (raw[row * stride] !== 0) throw new Error('expected filter type 0');
        rgb.set(raw.subarray(row * stride + 1, (row + 1) * stride), row * width * 3);
    }
    return { width, height, rgb };
}

/** Decoder shaped for the view model: PNG bytes in, packed RGB8 out. */
export function decodePngRgb(png: Uint8Array): Uint8Array {
    return decodePng(png).rgb;
}
