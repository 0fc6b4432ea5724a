/** Upload-side image helpers. The only pixel work done in the browser is
 * resizing the user's photo down to the model resolution; everything the
 * console displays comes back from the service. */

const PNG_PREFIX = "data:image/png;base64,";

export function pngDataUrl(b64: string): string {
  return PNG_PREFIX + b64;
}

export function stripDataUrl(dataUrl: string): string {
  const comma = dataUrl.indexOf(",");
  if (!dataUrl.startsWith("data:image/png") || comma < 0) {
    throw new Error("expected a PNG data URL");
  }
  return dataUrl.slice(comma + 1);
}

/** Draws a file into a size x size canvas and returns raw base64 PNG bytes.
 * Center-crops to square first so faces stay centered. */
export async function fileToModelPng(file: Blob, size: number): Promise<string> {
  const bitmap = await createImageBitmap(file);
  try {
    const side = Math.min(bitmap.width, bitmap.height);
    const sx = (bitmap.width - side) / 2;
    const sy = (bitmap.height - side) / 2;
    const canvas = document.createElement("canvas");
    canvas.width = size;
    canvas.height = size;
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    ctx.imageSmoothingEnabled = true;
    ctx.imageSmoothingQuality = "high";
    ctx.drawImage(bitmap, sx, sy, side, side, 0, 0, size, size);
    return stripDataUrl(canvas.toDataURL("image/png"));
  } finally {
    bitmap.close();
  }
}
