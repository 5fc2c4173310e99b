import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { parseCsv, requireColumns } from "../src/csv";
import { EmptyInput, MissingColumn } from "../src/errors";
import { CHART_NAMES, render } from "../src/render";

const FIXTURE = path.join(__dirname, "..", "fixtures", "report", "bench.csv");

let tmpDir: string;

beforeEach(() => {
  tmpDir = fs.mkdtempSync(path.join(os.tmpdir(), "plots-"));
});

afterEach(() => {
  fs.rmSync(tmpDir, { recursive: true, force: true });
});

function copyFixtureReport(): string {
  const reportDir = path.join(tmpDir, "report");
  fs.mkdirSync(reportDir);
  for (const name of ["bench.csv", "sweep.csv", "security.csv", "work.csv"]) {
    fs.copyFileSync(path.join(path.dirname(FIXTURE), name),
                    path.join(reportDir, name));
  }
  return path.join(reportDir, "bench.csv");
}

describe("csv", () => {
  it("parses header and rows", () => {
    const table = parseCsv("a,b\n1,2\n3,4\n", "t.csv");
    expect(table.columns).toEqual(["a", "b"]);
    expect(table.rows).toEqual([{ a: "1", b: "2" }, { a: "3", b: "4" }]);
  });

  it("raises EmptyInput on an empty file", () => {
    expect(() => parseCsv("", "t.csv")).toThrow(EmptyInput);
  });

  it("raises EmptyInput on header-only input", () => {
    const table = parseCsv("a,b\n", "t.csv");
    expect(() => requireColumns(table, ["a"], "t.csv")).toThrow(EmptyInput);
  });

  it("raises MissingColumn for absent columns", () => {
    const table = parseCsv("a,b\n1,2\n", "t.csv");
    expect(() => requireColumns(table, ["a", "zz"], "t.csv")).toThrow(MissingColumn);
  });
});

describe("render", () => {
  it("renders five non-empty charts with deterministic names", () => {
    const input = copyFixtureReport();
    const outDir = path.join(tmpDir, "charts");
    const written = render({ input, outDir });
    expect(written).toHaveLength(5);
    const names = written.map((f) => path.basename(f)).sort();
    expect(names).toEqual(["scalability.svg", "security.svg", "sizes.svg",
                           "times.svg", "work.svg"]);
    for (const file of written) {
      const body = fs.readFileSync(file, "utf-8");
      expect(body.length).toBeGreaterThan(0);
      expect(body.startsWith("<svg")).toBe(true);
      expect(body.trimEnd().endsWith("</svg>")).toBe(true);
    }
  });

  it("is idempotent: a rerun produces the same file set and bytes", () => {
    const input = copyFixtureReport();
    const outDir = path.join(tmpDir, "charts");
    const first = render({ input, outDir });
    const snapshot = new Map(first.map((f) => [f, fs.readFileSync(f, "utf-8")]));
    const second = render({ input, outDir });
    expect(second).toEqual(first);
    for (const file of second) {
      expect(fs.readFileSync(file, "utf-8")).toBe(snapshot.get(file));
    }
  });

  it("never mutates the input files", () => {
    const input = copyFixtureReport();
    const before = fs.readFileSync(input);
    render({ input, outDir: path.join(tmpDir, "charts") });
    expect(fs.readFileSync(input).equals(before)).toBe(true);
  });

  it("fails with MissingColumn when p95_ns is absent", () => {
    const input = copyFixtureReport();
    const lines = fs.readFileSync(input, "utf-8").trimEnd().split("\n");
    const header = lines[0].split(",");
    const drop = header.indexOf("p95_ns");
    const mutilated = lines
      .map((line) => line.split(",").filter((_, i) => i !== drop).join(","))
      .join("\n");
    fs.writeFileSync(input, mutilated + "\n");
    expect(() => render({ input, outDir: path.join(tmpDir, "charts") }))
      .toThrow(MissingColumn);
  });

  it("fails with EmptyInput on a data-less bench file", () => {
    const input = copyFixtureReport();
    const header = fs.readFileSync(input, "utf-8").split("\n")[0];
    fs.writeFileSync(input, header + "\n");
    expect(() => render({ input, outDir: path.join(tmpDir, "charts") }))
      .toThrow(EmptyInput);
  });

  it("rejects unknown chart names", () => {
    const input = copyFixtureReport();
    expect(() => render({
      input, outDir: path.join(tmpDir, "charts"),
      charts: ["volcano" as never],
    })).toThrow(/unknown chart/);
  });

  it("renders a subset when charts are selected", () => {
    const input = copyFixtureReport();
    const written = render({
      input, outDir: path.join(tmpDir, "charts"), charts: ["times", "security"],
    });
    expect(written.map((f) => path.basename(f))).toEqual(["times.svg", "security.svg"]);
  });

  it("draws one line per profile in the scalability chart", () => {
    const input = copyFixtureReport();
    const [file] = render({
      input, outDir: path.join(tmpDir, "charts"), charts: ["scalability"],
    });
    const body = fs.readFileSync(file, "utf-8");
    expect((body.match(/<polyline /g) ?? []).length).toBe(2);
    expect(body).toContain("mq-auth");
    expect(body).toContain("hashsig-auth");
    expect(body).toContain("sessions");
    expect(body).toContain("mean_us");
  });

  it("labels the security chart with the table's schemes and columns", () => {
    const input = copyFixtureReport();
    const [file] = render({
      input, outDir: path.join(tmpDir, "charts"), charts: ["security"],
    });
    const body = fs.readFileSync(file, "utf-8");
    for (const scheme of ["rsa-3072", "aes-128", "kyber", "sphincs+"]) {
      expect(body).toContain(scheme.replace("+", "+"));
    }
    expect(body).toContain("classical_bits");
    expect(body).toContain("quantum_bits");
  });

  it("exposes exactly the five chart names", () => {
    expect([...CHART_NAMES].sort()).toEqual(
      ["scalability", "security", "sizes", "times", "work"]);
  });
});
