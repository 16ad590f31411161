#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::io::{BufWriter, Write};
use std::time::{Duration, Instant};

use corefmark::cli::main_with;
use corefmark::formats::conll::{parse_conll, write_conll, ConllConfig};
use corefmark::formats::jsonl::{from_line, to_line};
use corefmark::formats::mmax::{parse_mmax, MmaxConfig};
use corefmark_core::errors::{build_report, ErrorCategory, ErrorRecord};
use corefmark_core::evaluation::{corpus_bleu, Smoothing};
use corefmark_core::rational::Rational;
use corefmark_core::stats::document_stats;
use corefmark_core::{
    enrich_document, strip_tags, Animacy, CohesiveFunction, Document, EnrichmentConfig, Gender, Mention,
    MentionCategory, NumberAttr, PronounType, Span,
};
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn toks(s: &str) -> Vec<String> {
    s.split(' ').map(str::to_string).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn randomized<S, F>(cases: u32, strategy: S, check: F) -> Result<(), String>
where
    S: Strategy,
    F: Fn(S::Value) -> Result<(), TestCaseError>,
{
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, check).map_err(|e| e.to_string())
}

fn tc(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    ensure(cond, msg).map_err(TestCaseError::fail)
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with(std::iter::once("corefmark").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn salt_doc() -> Document {
    let mut doc = Document::new("salt", "news");
    doc.sentences = vec![toks("The salt was too much ."), toks("I never cook with it .")];
    doc.push_mention(
        Mention::new("m1", "c1", Span::new(0, 0, 2), MentionCategory::NominalPhrase)
            .with_attributes(Gender::Neutral, NumberAttr::Singular, Animacy::Inanimate),
    );
    doc.push_mention(Mention::new("m2", "c1", Span::new(1, 4, 5), MentionCategory::Pronoun));
    doc.canonicalize();
    doc
}

fn biles_doc() -> Document {
    let mut doc = Document::new("biles", "news");
    doc.sentences = vec![toks("Simone Biles won gold ."), toks("Biles arrived late .")];
    doc.push_mention(
        Mention::new("m1", "c1", Span::new(0, 0, 2), MentionCategory::ProperName)
            .with_attributes(Gender::Female, NumberAttr::Singular, Animacy::Animate),
    );
    doc.push_mention(Mention::new("m2", "c1", Span::new(1, 0, 1), MentionCategory::ProperName));
    doc.canonicalize();
    doc.chains[0].head_mention_id = Some("m1".into());
    doc
}

fn example_fidelity() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let docs = dir.path().join("docs.jsonl");
    std::fs::write(&docs, format!("{}\n{}\n", to_line(&salt_doc()), to_line(&biles_doc()))).unwrap();
    let start = Instant::now();
    let (code, out, err) = cli(&["enrich", "--docs", docs.to_str().unwrap()]);
    let elapsed = start.elapsed();
    ensure(code == 0, || format!("exit {code}: {err}"))?;
    let lines: Vec<&str> = out.lines().collect();
    for want in ["I never cook with <b_crf> salt <e_crf> it .", "<b_crf> she <e_crf> Biles arrived late ."] {
        ensure(lines.contains(&want), || format!("missing line {want:?} in {lines:?}"))?;
    }
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("both lines byte-exact in {elapsed:?}"))
}

fn round_trip() -> Outcome {
    let cfg = EnrichmentConfig::default();
    randomized(1000, common::document(), |doc| {
        for s in enrich_document(&doc, &cfg).unwrap() {
            let stripped = strip_tags(&s.tokens, &cfg).map_err(|e| TestCaseError::fail(e.to_string()))?;
            tc(stripped == doc.sentences[s.sent_index], || format!("sentence {} of {}", s.sent_index, doc.id))?;
        }
        Ok(())
    })?;
    Ok("1000 documents, 0 failures".into())
}

/// One document with `mentions` NP mentions spread over `chains` chains.
fn counted_doc(id: &str, genre: &str, mentions: usize, chains: usize) -> Document {
    let mut doc = Document::new(id, genre);
    for i in 0..mentions {
        doc.sentences.push(toks("the thing ."));
        doc.push_mention(Mention::new(format!("m{i}"), format!("c{}", i % chains), Span::new(i, 0, 2), MentionCategory::NominalPhrase));
    }
    doc.canonicalize();
    doc
}

fn error_rates() -> Outcome {
    let cells = [
        ("S1", "news", 1216, 302, 117, "117 (9.6%)"),
        ("S2", "news", 1218, 302, 86, "86 (7.1%)"),
        ("S3", "news", 1174, 290, 121, "121 (10.3%)"),
        ("S1", "ted", 1270, 293, 84, "84 (6.6%)"),
        ("S2", "ted", 1268, 283, 105, "105 (8.3%)"),
        ("S3", "ted", 1277, 280, 83, "83 (6.5%)"),
    ];
    let mut rendered = Vec::new();
    for (system, genre, mentions, chains, errors, want) in cells {
        let doc = counted_doc(&format!("{system}-{genre}"), genre, mentions, chains);
        let stats = document_stats(&doc, 1);
        ensure(stats.mentions == mentions as u64 && stats.chains == chains as u64, || format!("{system} {genre} fixture"))?;
        let records: Vec<ErrorRecord> = doc
            .mentions
            .keys()
            .enumerate()
            .map(|(i, id)| ErrorRecord {
                doc_id: doc.id.clone(),
                system: system.into(),
                mention_id: id.clone(),
                correct: i >= errors,
                category: (i < errors).then(|| ErrorCategory::NAMED[i % 10].clone()),
                note: None,
            })
            .collect();
        let report = build_report(system, genre, &records, std::slice::from_ref(&doc)).map_err(|e| e.to_string())?;
        let got = report.count_with_rate();
        ensure(got == want, || format!("{system} {genre}: {got} != {want}"))?;
        rendered.push(got);
    }
    Ok(rendered.join(", "))
}

fn breakdown_fractions() -> Outcome {
    let mut doc = counted_doc("split", "news", 12, 4);
    let ids: Vec<String> = doc.mentions.keys().cloned().collect();
    for (i, id) in ids.iter().enumerate() {
        let m = doc.mentions.get_mut(id).unwrap();
        m.function = Some(if i < 3 { CohesiveFunction::Antecedent } else { CohesiveFunction::Anaphoric });
    }
    let records: Vec<ErrorRecord> = ids[..10]
        .iter()
        .map(|id| ErrorRecord {
            doc_id: "split".into(),
            system: "S1".into(),
            mention_id: id.clone(),
            correct: false,
            category: Some(ErrorCategory::Gender),
            note: None,
        })
        .collect();
    let report = build_report("S1", "news", &records, std::slice::from_ref(&doc)).map_err(|e| e.to_string())?;
    let split = report.antecedent_anaphor().ok_or("no split")?;
    ensure(split.first == "0.30" && split.second == "0.70", || format!("{split:?}"))?;

    let sums_to_one = |a: &str, b: &str| {
        let total: f64 = a.parse::<f64>().unwrap() + b.parse::<f64>().unwrap();
        (total - 1.0).abs() <= 0.005
    };
    for first in 0..=40u64 {
        for second in 0..=40u64 {
            if first + second == 0 {
                continue;
            }
            let mut r = report.clone();
            r.antecedent_errors = first;
            r.anaphor_errors = second;
            r.np_errors = second;
            r.pronoun_errors = first;
            for s in [r.antecedent_anaphor().unwrap(), r.np_pronoun().unwrap()] {
                ensure(sums_to_one(&s.first, &s.second), || format!("{first}/{second}: {s:?}"))?;
            }
        }
    }
    Ok("3/7 renders 0.30/0.70; all rows sum to 1.00".into())
}

fn bleu(hyps: &[&str], refs: &[&str], smoothing: Smoothing) -> f64 {
    let h: Vec<Vec<String>> = hyps.iter().map(|s| toks(s)).collect();
    let r: Vec<Vec<String>> = refs.iter().map(|s| toks(s)).collect();
    corpus_bleu::<_, _, String, String>(&h, &r, smoothing).unwrap().score
}

fn bleu_oracles() -> Outcome {
    let close = |got: f64, want: f64| (got - want).abs() <= 1e-9 * want.abs().max(f64::MIN_POSITIVE);
    let clip = corpus_bleu::<_, _, String, String>(&[toks("the the the")], &[toks("the cat")], Smoothing::None).unwrap();
    ensure(clip.ngram_precisions[0] == Some(Rational::new(1, 3)), || format!("{:?}", clip.ngram_precisions))?;
    let fixtures: [(&str, f64, f64); 5] = [
        ("clipping, unsmoothed", clip.score, 0.0),
        (
            "clipping, add-one",
            bleu(&["the the the"], &["the cat"], Smoothing::AddOne),
            100.0 * (1.0f64 / 18.0).powf(1.0 / 3.0),
        ),
        (
            "one substitution",
            bleu(&["the cat sat on the mat"], &["the cat sat on a mat"], Smoothing::None),
            100.0 * (1.0f64 / 12.0).powf(0.25),
        ),
        ("brevity", bleu(&["the cat sat on"], &["the cat sat on the mat"], Smoothing::None), 100.0 * (-0.5f64).exp()),
        (
            "two segments",
            bleu(&["a b c d e", "x y z w"], &["a b c d f", "x y q w"], Smoothing::None),
            100.0 * (8.0f64 / 135.0).powf(0.25),
        ),
    ];
    for (name, got, want) in fixtures {
        ensure(close(got, want), || format!("{name}: {got} vs {want}"))?;
    }
    let identity = bleu(&["the cat sat on the mat", "a b"], &["the cat sat on the mat", "a b"], Smoothing::None);
    ensure(identity == 100.0, || format!("identity gave {identity}"))?;
    Ok("5 fixtures within 1e-9; identity exactly 100".into())
}

fn chain_stats_brute_force() -> Outcome {
    randomized(1000, (common::maybe_empty_document(), 1usize..4), |(doc, min)| {
        let s = document_stats(&doc, min);
        let mut mentions = 0u64;
        let mut chains = 0u64;
        let mut longest = 0u64;
        for chain in &doc.chains {
            let n = doc.mentions.values().filter(|m| m.chain_id == chain.id).count() as u64;
            if n >= min as u64 {
                chains += 1;
                mentions += n;
                longest = longest.max(n);
            }
        }
        tc((s.mentions, s.chains) == (mentions, chains), || format!("{} counts", doc.id))?;
        tc(s.max_chain_length == Rational::from_integer(longest), || "max".into())?;
        tc(s.avg_chain_length * Rational::from_integer(s.chains) == Rational::from_integer(s.mentions), || "avg".into())?;
        Ok(())
    })?;
    Ok("1000 documents agree".into())
}

const CONLL_FIXTURES: [&str; 2] = [
    "\
#begin document (bc/cctv/00/cctv_0001); part 000
bc/cctv/00/cctv_0001\t0\t0\tShe\tPRP\t(3)
bc/cctv/00/cctv_0001\t0\t1\tmet\t-\t-
bc/cctv/00/cctv_0001\t0\t2\tthe\t-\t(7|(12
bc/cctv/00/cctv_0001\t0\t3\tcoach\t-\t12)
bc/cctv/00/cctv_0001\t0\t4\tof\t-\t-
bc/cctv/00/cctv_0001\t0\t5\tthe\t-\t(3
bc/cctv/00/cctv_0001\t0\t6\tteam\t-\t3)|7)

bc/cctv/00/cctv_0001\t0\t0\tHer\tPRP$\t(3)
bc/cctv/00/cctv_0001\t0\t1\tcoach\t-\t(12)
bc/cctv/00/cctv_0001\t0\t2\twho\tWP\t(12)
bc/cctv/00/cctv_0001\t0\t3\tleft\t-\t-

#end document
",
    "\
#begin document (a); part 000
a\t0\t0\tHi\t-\t-

#end document
#begin document (a); part 001
a\t1\t0\tIt\tPRP\t(1)
a\t1\t1\trained\t-\t-
a\t1\t2\t.\t-\t-

a\t1\t0\tIt\tPRP\t(1)

#end document
",
];

const MMAX_WORDS: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<words>
<word id="word_1">The</word>
<word id="word_2">salt</word>
<word id="word_3">was</word>
<word id="word_4">too</word>
<word id="word_5">much</word>
<word id="word_6">.</word>
<word id="word_7">I</word>
<word id="word_8">never</word>
<word id="word_9">cook</word>
<word id="word_10">with</word>
<word id="word_11">it</word>
<word id="word_12">.</word>
</words>"#;

const MMAX_SENTENCES: &str = r#"<markables>
<markable id="markable_1" span="word_1..word_6"/>
<markable id="markable_2" span="word_7..word_12"/>
</markables>"#;

const MMAX_MARKABLES: &str = r#"<markables>
<markable id="markable_11" span="word_11" coref_class="set_1" mention_type="pronoun" pronoun_type="personal" cohesive_function="anaphoric" gender="neutral" number="singular" animacy="inanimate"/>
<markable id="markable_10" span="word_1..word_2" coref_class="set_1" mention_type="np" cohesive_function="antecedent" gender="neutral" number="singular" animacy="inanimate"/>
<markable id="markable_12" span="word_7" coref_class="empty" mention_type="pronoun"/>
</markables>"#;

fn format_round_trips() -> Outcome {
    randomized(1000, common::document(), |doc| {
        let back = from_line(&to_line(&doc), 1).map_err(|e| TestCaseError::fail(e.to_string()))?;
        tc(back == doc, || format!("jsonl {}", doc.id))
    })?;

    for (i, text) in CONLL_FIXTURES.iter().enumerate() {
        let docs = parse_conll(text.as_bytes(), &ConllConfig::default()).map_err(|e| format!("conll {i}: {e}"))?;
        let mut out = Vec::new();
        write_conll(&mut out, &docs).unwrap();
        let written = String::from_utf8(out).unwrap();
        ensure(written == *text, || format!("conll fixture {i} rewrote as\n{written}"))?;
    }

    let parsed = parse_mmax(
        "salt",
        MMAX_WORDS.as_bytes(),
        MMAX_MARKABLES.as_bytes(),
        Some(MMAX_SENTENCES.as_bytes()),
        &MmaxConfig { genre: "news".into(), ..MmaxConfig::default() },
    )
    .map_err(|e| e.to_string())?;
    let mut expected = Document::new("salt", "news");
    expected.sentences = vec![toks("The salt was too much ."), toks("I never cook with it .")];
    let attrs = (Gender::Neutral, NumberAttr::Singular, Animacy::Inanimate);
    let mut np = Mention::new("markable_10", "set_1", Span::new(0, 0, 2), MentionCategory::NominalPhrase)
        .with_attributes(attrs.0, attrs.1, attrs.2);
    np.function = Some(CohesiveFunction::Antecedent);
    let mut it = Mention::new("markable_11", "set_1", Span::new(1, 4, 5), MentionCategory::Pronoun)
        .with_attributes(attrs.0, attrs.1, attrs.2);
    it.function = Some(CohesiveFunction::Anaphoric);
    it.pronoun_type = Some(PronounType::Personal);
    expected.push_mention(np);
    expected.push_mention(it);
    expected.canonicalize();
    ensure(parsed == expected, || format!("mmax parsed as {parsed:#?}"))?;
    Ok("jsonl 1000 randomized, conll 2 fixtures, mmax fixture".into())
}

const SENTENCES: usize = 1_000_000;
const PER_DOC: usize = 50;

fn synthetic_doc(n: usize) -> Document {
    let mut doc = Document::new(format!("doc{n}"), "news");
    for s in 0..PER_DOC {
        let chain = format!("c{}", s / 5);
        if s % 5 == 0 {
            doc.sentences.push(toks("The national team coach said the squad would arrive late ."));
            doc.push_mention(
                Mention::new(format!("m{s}a"), chain.clone(), Span::new(s, 0, 4), MentionCategory::NominalPhrase)
                    .with_attributes(Gender::Female, NumberAttr::Singular, Animacy::Animate),
            );
            doc.push_mention(
                Mention::new(format!("m{s}b"), format!("x{}", s / 5), Span::new(s, 6, 8), MentionCategory::NominalPhrase)
                    .with_attributes(Gender::Unknown, NumberAttr::Plural, Animacy::Unknown),
            );
        } else {
            doc.sentences.push(toks("She told them that the minimum wage was too low ."));
            doc.push_mention(Mention::new(format!("m{s}a"), chain, Span::new(s, 0, 1), MentionCategory::Pronoun));
            doc.push_mention(Mention::new(format!("m{s}b"), format!("x{}", s / 5), Span::new(s, 2, 3), MentionCategory::Pronoun));
        }
    }
    doc.canonicalize();
    doc
}

fn throughput() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let docs = dir.path().join("corpus.jsonl");
    let out = dir.path().join("corpus.txt");
    {
        let mut w = BufWriter::new(std::fs::File::create(&docs).unwrap());
        let template = to_line(&synthetic_doc(0));
        for n in 0..SENTENCES / PER_DOC {
            writeln!(w, "{}", template.replacen("\"doc0\"", &format!("\"doc{n}\""), 1)).unwrap();
        }
    }
    let start = Instant::now();
    let (code, _, err) = cli(&["enrich", "--docs", docs.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let elapsed = start.elapsed();
    ensure(code == 0, || format!("exit {code}: {err}"))?;
    let lines = std::fs::read_to_string(&out).unwrap().lines().count();
    ensure(lines == SENTENCES, || format!("{lines} lines written"))?;
    let rate = SENTENCES as f64 / elapsed.as_secs_f64();
    ensure(rate >= 50_000.0, || format!("{rate:.0} sentences/s"))?;
    Ok(format!("{SENTENCES} sentences in {:.2}s ({rate:.0} sentences/s)", elapsed.as_secs_f64()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("example fidelity", example_fidelity),
        ("strip/enrich round trip", round_trip),
        ("error-rate reconstruction", error_rates),
        ("breakdown fractions", breakdown_fractions),
        ("BLEU oracle equivalence", bleu_oracles),
        ("chain-stats brute force", chain_stats_brute_force),
        ("format round trips", format_round_trips),
        ("throughput", throughput),
    ];
    let mut failed = BTreeMap::new();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                println!("FAIL {name}: {why}");
                failed.insert(name, why);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {:?}", failed.keys().collect::<Vec<_>>());
        std::process::exit(1);
    }
}
