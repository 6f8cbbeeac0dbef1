/** Input helpers: slider rate limiting and canvas click mapping. */

/** Rate-limit a setter to one call per window.
 *
 * The first call in a quiet period fires immediately; further calls within
 * the window collapse into one trailing call carrying the latest value, so
 * a slider drag emits at most one command per window.
 */
export function debounce<T>(
    fn: (value: T) => void,
    windowMs: number,
): (value: T) => void {
    let lastEmit = -Infinity;
    let timer: ReturnType<typeof setTimeout> | null = null;
    let latest: T;
    return (value: T) => {
        latest = value;
        if (timer !== null) return;
        const elapsed = Date.now() - lastEmit;
        if (elapsed >= windowMs) {
            lastEmit = Date.now();
            fn(latest);
        } else {
            timer = setTimeout(() => {
                timer = null;
                lastEmit = Date.now();
                fn(latest);
            }, windowMs - elapsed);
        }
    };
}

/** Map a click inside a displayed canvas element to world coordinates.
 *
 * The element shows the full canvas, world y grows upward while element y
 * grows downward. Clicks landing outside the canvas rectangle return null.
 */
export function mapClickToWorld(
    offsetX: number,
    offsetY: number,
    elementWidth: number,
    elementHeight: number,
    canvasSize: readonly [number, number],
): [number, number] | null {
    if (elementWidth <= 0 || elementHeight <= 0) return null;
    const x = (offsetX / elementWidth) * canvasSize[0];
    const y = (1.0 - offsetY / elementHeight) * canvasSize[1];
    if (!(x >= 0 && x <= canvasSize[0] && y >= 0 && y <= canvasSize[1])) {
        return null;
    }
    return [x, y];
}

/** Clamp a slider value into the inclusive bounds the session config allows. */
export function clampToBounds(value: number, min: number, max: number): number {
    return Math.min(max, Math.max(min, value));
}
