import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';
import { clampToBounds, debounce, mapClickToWorld } from '../src/controls.js';

describe('debounce', () => {
    beforeEach(() => vi.useFakeTimers());
    afterEach(() => vi.useRealTimers());

    it('fires immediately from a quiet start', () => {
        const calls: number[] = [];
        const emit = debounce((v: number) => calls.push(v), 150);
        emit(1);
        expect(calls).toEqual([1]);
    });

    it('collapses a burst into one trailing call with the latest value', () => {
        const calls: number[] = [];
        const emit = debounce((v: number) => calls.push(v), 150);
        emit(1);
        emit(2);
        vi.advanceTimersByTime(50);
        emit(3);
        emit(4);
        expect(calls).toEqual([1]);
        vi.advanceTimersByTime(100);
        expect(calls).toEqual([1, 4]);
    });

    it('never fires more than once per window during a long drag', () => {
        const calls: number[] = [];
        const emit = debounce((v: number) => calls.push(v), 150);
        for (let t = 0; t < 1500; t += 10) {
            emit(t);
            vi.advanceTimersByTime(10);
        }
        vi.advanceTimersByTime(150);
        // 1.5 s of continuous input: one leading call plus one per window.
        expect(calls.length).toBeLessThanOrEqual(11);
        expect(calls.length).toBeGreaterThanOrEqual(10);
        expect(calls[calls.length - 1]).toBe(1490);
    });

    it('separate quiet periods each fire immediately', () => {
        const calls: number[] = [];
        const emit = debounce((v: number) => calls.push(v), 150);
        emit(1);
        vi.advanceTimersByTime(200);
        emit(2);
        expect(calls).toEqual([1, 2]);
    });
});

describe('mapClickToWorld', () => {
    const size: [number, number] = [500, 500];

    it('maps the element centre to the canvas centre', () => {
        expect(mapClickToWorld(200, 150, 400, 300, size)).toEqual([250, 250]);
    });

    it('flips y: the top edge of the element is the top of the canvas', () => {
        expect(mapClickToWorld(0, 0, 400, 300, size)).toEqual([0, 500]);
        expect(mapClickToWorld(400, 300, 400, 300, size)).toEqual([500, 0]);
    });

    it('scales with the displayed element size', () => {
        const world = mapClickToWorld(100, 75, 400, 300, size);
        expect(world).not.toBeNull();
        expect(world![0]).toBeCloseTo(125, 12);
        expect(world![1]).toBeCloseTo(375, 12);
    });

    it('returns null outside the element rectangle', () => {
        expect(mapClickToWorld(-5, 10, 400, 300, size)).toBeNull();
        expect(mapClickToWorld(10, -5, 400, 300, size)).toBeNull();
        expect(mapClickToWorld(401, 10, 400, 300, size)).toBeNull();
        expect(mapClickToWorld(10, 301, 400, 300, size)).toBeNull();
    });

    it('returns null for degenerate elements', () => {
        expect(mapClickToWorld(0, 0, 0, 300, size)).toBeNull();
    });
});

describe('clampToBounds', () => {
    it('clamps into the inclusive range', () => {
        expect(clampToBounds(3, 1, 5)).toBe(3);
        expect(clampToBounds(-2, 1, 5)).toBe(1);
        expect(clampToBounds(99, 1, 5)).toBe(5);
    });
});
