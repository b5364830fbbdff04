/**
 * Framed JSON wire protocol: a 4-byte big-endian unsigned length prefix
 * followed by a UTF-8 JSON object carrying a "type" field out of PING,
 * PONG, EVALUATE, RESULT and ERROR.
 */

export const MAX_FRAME_BYTES = 16 * 1024 * 1024;

export const TYPE_PING = "PING";
export const TYPE_PONG = "PONG";
export const TYPE_EVALUATE = "EVALUATE";
export const TYPE_RESULT = "RESULT";
export const TYPE_ERROR = "ERROR";

export interface Message {
  type: string;
  [key: string]: unknown;
}

export class ProtocolError extends Error {}

export function encodeFrame(message: Message): Buffer {
  const payload = Buffer.from(JSON.stringify(message), "utf-8");
  if (payload.length > MAX_FRAME_BYTES) {
    throw new ProtocolError(`frame of ${payload.length} bytes exceeds cap`);
  }
  const header = Buffer.alloc(4);
  header.writeUInt32BE(payload.length, 0);
  return Buffer.concat([header, payload]);
}

/**
 * Incremental decoder for a byte stream arriving in arbitrary chunks.
 * push() returns every complete message contained so far and throws
 * ProtocolError on an oversized length prefix or an unparseable payload.
 */
export class FrameDecoder {
  private buffer: Buffer = Buffer.alloc(0);

  push(chunk: Buffer): Message[] {
    this.buffer = Buffer.concat([this.buffer, chunk]);
    const messages: Message[] = [];
    while (this.buffer.length >= 4) {
      const length = this.buffer.readUInt32BE(0);
      if (length > MAX_FRAME_BYTES) {
        throw new ProtocolError(`declared frame length ${length} exceeds cap`);
      }
      if (this.buffer.length < 4 + length) {
        break;
      }
      const payload = this.buffer.subarray(4, 4 + length);
      this.buffer = this.buffer.subarray(4 + length);
      messages.push(parsePayload(payload));
    }
    return messages;
  }
}

function parsePayload(payload: Buffer): Message {
  let parsed: unknown;
  try {
    parsed = JSON.parse(payload.toString("utf-8"));
  } catch (err) {
    throw new ProtocolError(`invalid payload: ${err}`);
  }
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed) ||
      typeof (parsed as Message).type !== "string") {
    throw new ProtocolError("payload must be an object with a 'type' field");
  }
  return parsed as Message;
}

export function resultMessage(jobId: number, accuracy: number, bestEpoch: number): Message {
  return { type: TYPE_RESULT, jobId, accuracy, bestEpoch };
}

export function errorMessage(jobId: number | null, message: string): Message {
  return { type: TYPE_ERROR, jobId, message };
}
