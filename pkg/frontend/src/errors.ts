/** Error categories surfaced by the renderer. */

export class MissingColumn extends Error {
  constructor(file: string, column: string) {
    super(`${file} is missing required column "${column}"`);
    this.name = "MissingColumn";
  }
}

export class EmptyInput extends Error {
  constructor(file: string) {
    super(`${file} has no data rows`);
    this.name = "EmptyInput";
  }
}
