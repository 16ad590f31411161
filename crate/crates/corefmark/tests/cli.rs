use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SALT: &str = r#"{"id":"salt","genre":"news","sentences":[["The","salt","was","too","much","."],["I","never","cook","with","it","."]],"mentions":[{"id":"m1","chain_id":"c1","sent":0,"start":0,"end":2,"category":"nominal_phrase","gender":"neutral","number":"singular","animacy":"inanimate"},{"id":"m2","chain_id":"c1","sent":1,"start":4,"end":5,"category":"pronoun","gender":"unknown","number":"unknown","animacy":"unknown"}],"chains":[{"id":"c1","mentions":["m1","m2"]}]}"#;

const PLAIN: &str = r#"{"id":"plain","genre":"ted","sentences":[["Nothing","here","."]],"mentions":[],"chains":[]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corefmark"))
        .args(args)
        .env_remove("COREFMARK_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn assert_failure(o: &Output, code: i32) {
    assert_eq!(o.status.code(), Some(code), "stderr: {}", stderr(o));
    assert!(o.stdout.is_empty(), "stdout: {}", stdout(o));
    assert_eq!(stderr(o).trim_end().lines().count(), 1, "stderr: {}", stderr(o));
}

#[test]
fn enrich_salt_to_file() {
    let dir = TempDir::new().unwrap();
    let docs = write(&dir, "d.jsonl", &format!("{SALT}\n{PLAIN}\n"));
    let out = dir.path().join("t.txt");
    let index = dir.path().join("t.idx");
    let o = run(&["enrich", "--docs", s(&docs), "--out", s(&out), "--index", s(&index)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    assert_eq!(
        fs::read_to_string(&out).unwrap(),
        "<b_crf> it <e_crf> The salt was too much .\nI never cook with <b_crf> salt <e_crf> it .\nNothing here .\n"
    );
    assert_eq!(fs::read_to_string(&index).unwrap(), "salt\t0\nsalt\t1\nplain\t0\n");

    let stripped = run(&["strip", "--input", s(&out)]);
    assert_eq!(stdout(&stripped), "The salt was too much .\nI never cook with it .\nNothing here .\n");

    let subset = run(&["subset", "--docs", s(&docs)]);
    assert_eq!(stdout(&subset), "0\n1\n");
}

#[test]
fn stats_on_empty_corpus() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty.jsonl", "");
    let o = run(&["stats", "--docs", s(&empty)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "corpus\tgenre\ttokens\tmentions\tchains\tavg_len\tmax_len\taggregation\n");
}

#[test]
fn stats_report() {
    let dir = TempDir::new().unwrap();
    let docs = write(&dir, "d.jsonl", &format!("{SALT}\n"));
    let o = run(&["stats", "--docs", s(&docs), "--corpus", "src", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["corpus"], "src");
    assert_eq!(v[0]["mentions"], 2);
    assert_eq!(v[0]["chains"], 1);
    assert_eq!(v[0]["tokens"], 12);
}

#[test]
fn bleu_of_identical_files() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.txt", "the cat sat on the mat\na b\n");
    let o = run(&["eval", "bleu", "--hyp", s(&h), "--ref", s(&h)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "100.0\n");

    let subset = write(&dir, "subset.txt", "1\n");
    let o = run(&["eval", "bleu", "--hyp", s(&h), "--ref", s(&h), "--subset", s(&subset), "--report", "--system", "S1", "--genre", "news"]);
    assert_eq!(stdout(&o), "system\tgenre\tslice\tbleu\tmeteor\nS1\tnews\tall\t100.0\t\nS1\tnews\tcoref\t100.0\t\n");
}

#[test]
fn errors_report() {
    let dir = TempDir::new().unwrap();
    let docs = write(&dir, "s1.jsonl", &format!("{SALT}\n"));
    let records = write(
        &dir,
        "records.tsv",
        "doc_id\tsystem\tmention_id\tcorrect\tcategory\nsalt\tS1\tm1\ttrue\t\nsalt\tS1\tm2\tfalse\tgender\n",
    );
    let breakdown = dir.path().join("b.tsv");
    let docs_arg = format!("S1={}", s(&docs));
    let o = run(&["errors", "--records", s(&records), "--docs", &docs_arg, "--breakdown", s(&breakdown)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "system\tgenre\tmentions\terrors\trate\tantecedent\tanaphor\tnp\tpronoun\tother_type\nS1\tnews\t2\t1\t50.0%\t0.00\t1.00\t0.00\t1.00\t0\n"
    );
    assert!(fs::read_to_string(&breakdown).unwrap().contains("gender\tS1\tnews\t1\t1.00"));

    let stray = write(&dir, "stray.tsv", "doc_id\tsystem\tmention_id\tcorrect\tcategory\nother\tS1\tm1\tfalse\tcase\n");
    assert_failure(&run(&["errors", "--records", s(&stray), "--docs", &docs_arg]), 3);
}

#[test]
fn convert_round_trip() {
    let dir = TempDir::new().unwrap();
    let conll = write(
        &dir,
        "in.conll",
        "#begin document (t); part 000\nt\t0\t0\tShe\tPRP\t(3)\nt\t0\t1\tleft\t-\t-\n\nt\t0\t0\tShe\tPRP\t(3)\n\n#end document\n",
    );
    let jsonl = dir.path().join("t.jsonl");
    let o = run(&["convert", "--from", "conll", "--to", "jsonl", "--input", s(&conll), "--out", s(&jsonl)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let back = run(&["convert", "--from", "jsonl", "--to", "conll", "--input", s(&jsonl)]);
    assert_eq!(stdout(&back), fs::read_to_string(&conll).unwrap());
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.jsonl");
    assert_failure(&run(&["enrich", "--docs", s(&missing)]), 1);
    assert_failure(&run(&["enrich", "--bogus"]), 1);
    assert_failure(&run(&["stats", "--docs", s(&missing)]), 1);

    let broken = write(&dir, "broken.jsonl", &format!("{SALT}\n{{\"id\": \n"));
    let o = run(&["enrich", "--docs", s(&broken)]);
    assert_failure(&o, 2);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let out = dir.path().join("never.txt");
    assert_failure(&run(&["enrich", "--docs", s(&broken), "--out", s(&out)]), 2);
    assert!(!out.exists());

    let invalid = write(&dir, "invalid.jsonl", &SALT.replace("\"start\":4,\"end\":5", "\"start\":4,\"end\":9"));
    assert_failure(&run(&["enrich", "--docs", s(&invalid)]), 3);

    let h = write(&dir, "h.txt", "a b\n");
    let r = write(&dir, "r.txt", "a b\nc d\n");
    assert_failure(&run(&["eval", "bleu", "--hyp", s(&h), "--ref", s(&r)]), 3);
}

#[test]
fn output_does_not_depend_on_threads() {
    let dir = TempDir::new().unwrap();
    let mut corpus = String::new();
    for i in 0..3000 {
        corpus.push_str(&SALT.replacen("\"salt\"", &format!("\"d{i}\""), 1));
        corpus.push('\n');
        corpus.push_str(&PLAIN.replacen("\"plain\"", &format!("\"p{i}\""), 1));
        corpus.push('\n');
    }
    let docs = write(&dir, "many.jsonl", &corpus);
    let one = run(&["--threads", "1", "enrich", "--docs", s(&docs)]);
    let four = run(&["--threads", "4", "enrich", "--docs", s(&docs)]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_corefmark"))
        .args(["enrich", "--docs", s(&docs)])
        .env("COREFMARK_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(one.stdout, env.stdout);

    let stats1 = run(&["--threads", "1", "stats", "--docs", s(&docs), "--aggregation", "both"]);
    let stats4 = run(&["--threads", "4", "stats", "--docs", s(&docs), "--aggregation", "both"]);
    assert_eq!(stats1.stdout, stats4.stdout);
}

#[test]
fn version() {
    let o = run(&["--version"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("document schema 1"), "{}", stdout(&o));
}
