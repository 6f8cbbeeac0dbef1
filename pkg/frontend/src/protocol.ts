/** Wire types for the session service: HTTP bodies and stream frames. */
import { z } from 'zod';

/** One deposited disc: [robot, x, y, width, alphaC, alphaM, alphaY]. */
export const stampSchema = z.tuple([
    z.number(), z.number(), z.number(), z.number(),
    z.number(), z.number(), z.number(),
]);
export type Stamp = z.infer<typeof stampSchema>;

export const chordInfoSchema = z.object({
    label: z.string(),
    function: z.string().nullable(),
    emotions: z.array(z.string()),
    color: z.array(z.number()).length(3).nullable(),
});

export const densitySchema = z.object({
    pigment: z.number().int(),
    center: z.tuple([z.number(), z.number()]),
    sigma: z.tuple([z.number(), z.number()]),
    k: z.number(),
});

export const robotSchema = z.object({
    x: z.number(),
    y: z.number(),
    theta: z.number(),
    equipment: z.array(z.number().int()),
    alpha: z.array(z.number()).length(3),
});

export const snapshotSchema = z.object({
    seq: z.number().int(),
    step: z.number().int(),
    clock: z.number(),
    paused: z.boolean(),
    state: z.string(),
    l: z.number(),
    trail_width: z.number(),
    cost: z.number(),
    chords_consumed: z.number().int(),
    chord: chordInfoSchema.nullable(),
    densities: z.array(densitySchema),
    robots: z.array(robotSchema),
    stamps: z.array(stampSchema),
    keyframe: z.object({ png_base64: z.string() }).nullable(),
});
export type Snapshot = z.infer<typeof snapshotSchema>;

export const ackSchema = z.object({
    command_id: z.string(),
    step: z.number().int(),
});
export type Ack = z.infer<typeof ackSchema>;

export const errorSchema = z.object({
    command_id: z.string().nullable(),
    message: z.string(),
});
export type StreamError = z.infer<typeof errorSchema>;

export const doneSchema = z.object({
    step: z.number().int(),
    clock: z.number(),
    painting_url: z.string(),
});
export type Done = z.infer<typeof doneSchema>;

export const serverFrameSchema = z.discriminatedUnion('type', [
    z.object({ type: z.literal('snapshot'), payload: snapshotSchema }),
    z.object({ type: z.literal('ack'), payload: ackSchema }),
    z.object({ type: z.literal('error'), payload: errorSchema }),
    z.object({ type: z.literal('done'), payload: doneSchema }),
]);
export type ServerFrame = z.infer<typeof serverFrameSchema>;

export function parseServerFrame(raw: string): ServerFrame {
    return serverFrameSchema.parse(JSON.parse(raw));
}

/** Client-side command payloads. */
export type WireCommand =
    | { id: string; kind: 'set_center'; x: number; y: number }
    | { id: string; kind: 'set_l'; value: number }
    | { id: string; kind: 'set_trail_width'; value: number }
    | { id: string; kind: 'pause' }
    | { id: string; kind: 'resume' };

export function commandFrame(command: WireCommand): string {
    return JSON.stringify({ type: 'command', payload: command });
}

/** The slice of the session config the client renders and bounds UI with. */
export const sessionConfigSchema = z.object({
    canvas_size: z.tuple([z.number(), z.number()]),
    pixels_per_unit: z.number(),
    trail_strength: z.number(),
    trail_width: z.number(),
    max_trail_width: z.number(),
    motion: z.object({
        l_min: z.number(),
        l_max: z.number(),
        t_max: z.number(),
    }),
}).passthrough();
export type SessionConfig = z.infer<typeof sessionConfigSchema>;

export const sessionInfoSchema = z.object({
    id: z.string(),
    state: z.string(),
    duration: z.number(),
    pace: z.number(),
    config: sessionConfigSchema,
    painting_url: z.string(),
    stream_url: z.string(),
});
export type SessionInfo = z.infer<typeof sessionInfoSchema>;

export async function createSession(
    baseUrl: string,
    body: { timeline: unknown; config?: unknown; pace?: number; duration?: number },
): Promise<SessionInfo> {
    const response = await fetch(`${baseUrl}/sessions`, {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify(body),
    });
    if (!response.ok) {
        const detail = await response.text();
        throw new Error(`create session failed (${response.status}): ${detail}`);
    }
    return sessionInfoSchema.parse(await response.json());
}
