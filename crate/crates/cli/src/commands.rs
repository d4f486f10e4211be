use std::collections::BTreeSet;
use std::fs::File;
use std::path::Path;

use anyhow::{bail, Context, Result};
use appemotion_core::analytics::{
    self, category_csv, correlation_csv, dispersion_csv, format_number, rating_csv,
};
use appemotion_core::emoji::EmojiLexicon;
use appemotion_core::store::{
    fetch_app_details, fetch_reviews_for_apps, import_releases, Archive, ArchiveLock, FetchError,
    HttpStoreClient,
};
use appemotion_core::temporal::{
    classify_patterns, pattern_report, qualifying_apps, release_impact, render_timeline, weekly_aggregate,
    PatternLabel, TemporalError,
};

use crate::args::{Command, Target};
use crate::config::RunConfig;

fn load(path: &Path) -> Result<Archive> {
    let (archive, report) = Archive::load(path)?;
    for s in &report.skipped {
        log::warn!("{}: line {} skipped: {}", path.display(), s.line, s.reason);
    }
    Ok(archive)
}

/// Runs one command; returns the report to print, if the command has one.
pub async fn run(config: &RunConfig, command: &Command) -> Result<Option<String>> {
    let _lock = if command.writes_archive() {
        Some(ArchiveLock::acquire(&config.archive)?)
    } else {
        None
    };
    match command {
        Command::Ingest { apps, import, releases } => {
            ingest(config, apps, import.as_deref(), releases.as_deref()).await?;
            Ok(None)
        }
        Command::Score => {
            let engine = config.engine()?;
            let mut archive = load(&config.archive)?;
            archive.score_all(&engine);
            archive.persist(&config.archive)?;
            log::info!("scored {} reviews", archive.scored.len());
            Ok(None)
        }
        Command::Summarize => {
            let archive = load(&config.archive)?;
            let mut rows = analytics::summarize_by_category(&archive)?;
            rows.push(analytics::summarize_overall(&archive)?);
            Ok(Some(category_csv(&rows)))
        }
        Command::Correlate { target, exclude_neutral } => {
            let archive = load(&config.archive)?;
            let report = match target {
                Target::Rating => analytics::sentiment_vs_rating(&archive, *exclude_neutral)?,
                Target::Price => analytics::sentiment_vs_price(&archive, *exclude_neutral)?,
            };
            Ok(Some(correlation_csv(&[report])))
        }
        Command::Ratings => {
            let archive = load(&config.archive)?;
            Ok(Some(rating_csv(&analytics::sentiment_by_rating(&archive)?)))
        }
        Command::Topics { labeled } => {
            let file = File::open(labeled).with_context(|| format!("opening {}", labeled.display()))?;
            let import = analytics::load_labeled(file).with_context(|| format!("reading {}", labeled.display()))?;
            for r in &import.rejected {
                log::warn!("{}: line {} rejected: {}", labeled.display(), r.line, r.reason);
            }
            let engine = config.engine()?;
            Ok(Some(dispersion_csv(&analytics::dispersion_by_topic(&import.resolve(&engine)))))
        }
        Command::Timeline { app } => {
            let archive = load(&config.archive)?;
            let series = weekly_aggregate(&archive, app, config.from, config.to)?;
            Ok(Some(render_timeline(&series)))
        }
        Command::Patterns => {
            let archive = load(&config.archive)?;
            Ok(Some(patterns(config, &archive)?))
        }
        Command::Impact { app } => {
            let archive = load(&config.archive)?;
            Ok(Some(impact(config, &archive, app)?))
        }
        Command::EmojiConvert { input, min } => {
            let file = File::open(input).with_context(|| format!("opening {}", input.display()))?;
            let lexicon = EmojiLexicon::from_ranking_csv(file, *min)
                .with_context(|| format!("reading {}", input.display()))?;
            let mut out = Vec::new();
            lexicon.write_csv(&mut out)?;
            log::info!("{} emojis with at least {min} occurrences", lexicon.len());
            Ok(Some(String::from_utf8(out)?))
        }
    }
}

async fn ingest(config: &RunConfig, apps: &[String], import: Option<&Path>, releases: Option<&Path>) -> Result<()> {
    let (mut archive, report) = Archive::load_or_default(&config.archive)?;
    for s in &report.skipped {
        log::warn!("{}: line {} skipped: {}", config.archive.display(), s.line, s.reason);
    }
    let mut failures = Vec::new();

    if let Some(path) = import {
        let other = load(path)?;
        let (n_apps, n_releases) = (other.apps.len(), other.releases.len());
        for app in other.apps {
            archive.upsert_app(app);
        }
        let added_releases = other.releases.into_iter().filter(|r| archive.add_release(r.clone())).count();
        let reviews = other.reviews.into_iter().chain(other.scored.into_iter().map(|s| s.review));
        let added = archive.add_reviews(reviews);
        log::info!(
            "imported {n_apps} apps, {added_releases} of {n_releases} releases, {added} new reviews from {}",
            path.display()
        );
    }

    if !apps.is_empty() {
        let client = HttpStoreClient::new(config.client.clone())?;
        let ids: Vec<String> = apps.iter().collect::<BTreeSet<_>>().into_iter().cloned().collect();
        let (found, errors) = match fetch_app_details(&client, &ids).await {
            Ok(batch) => (batch.apps, batch.errors),
            Err(FetchError::AllFailed(errors)) => (Vec::new(), errors),
            Err(e) => return Err(e.into()),
        };
        for (id, e) in &errors {
            failures.push(format!("details for {id}: {e}"));
        }
        for app in found {
            archive.upsert_app(app);
        }
        let requests: Vec<_> = ids
            .iter()
            .filter(|id| archive.app(id).is_some())
            .map(|id| (id.clone(), archive.newest_review_date(id).and_then(|d| d.pred_opt())))
            .collect();
        for fetch in fetch_reviews_for_apps(&client, &requests).await {
            let added = archive.add_reviews(fetch.reviews);
            log::info!("app {}: {added} new reviews from {} pages", fetch.app_id, fetch.pages);
            if let Some(e) = fetch.error {
                failures.push(format!("reviews for {}: {e}", fetch.app_id));
            }
        }
    }

    if let Some(path) = releases {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let import = import_releases(file).with_context(|| format!("reading {}", path.display()))?;
        for r in &import.rejected {
            log::warn!("{}: line {} rejected: {}", path.display(), r.line, r.reason);
        }
        let total = import.releases.len();
        let added = import.releases.into_iter().filter(|r| archive.add_release(r.clone())).count();
        log::info!("{added} of {total} releases added from {}", path.display());
    }

    archive.persist(&config.archive)?;
    if !failures.is_empty() {
        bail!("ingest incomplete (partial results saved):\n  {}", failures.join("\n  "));
    }
    Ok(())
}

fn patterns(config: &RunConfig, archive: &Archive) -> Result<String> {
    if !archive.is_fully_scored() {
        return Err(TemporalError::Unscored(archive.reviews.len()).into());
    }
    let mut rows: Vec<(String, BTreeSet<PatternLabel>)> = Vec::new();
    for app in qualifying_apps(archive, config.from, config.to, config.min_reviews) {
        let series = weekly_aggregate(archive, &app, config.from, config.to)?;
        match classify_patterns(&series, &config.pattern) {
            Ok(labels) => rows.push((app, labels)),
            Err(e @ TemporalError::InsufficientData { .. }) => log::warn!("app {app} skipped: {e}"),
            Err(e) => return Err(e.into()),
        }
    }
    if rows.is_empty() {
        log::warn!("no app has more than {} reviews in the window", config.min_reviews);
    }
    Ok(pattern_report(&rows))
}

fn impact(config: &RunConfig, archive: &Archive, app: &str) -> Result<String> {
    let series = weekly_aggregate(archive, app, config.from, config.to)?;
    let opt = |x: Option<f64>| x.map(format_number).unwrap_or_default();
    let mut out = String::from(
        "version,week,pre_mean,post_mean,delta,pre_volume,post_volume,pre_length,post_length,truncated\n",
    );
    for (week, version) in &series.releases {
        let r = release_impact(&series, *week, config.pattern.window)?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            csv_field(version),
            week + 1,
            opt(r.pre_mean),
            opt(r.post_mean),
            opt(r.delta),
            format_number(r.pre_volume),
            format_number(r.post_volume),
            opt(r.pre_length),
            opt(r.post_length),
            r.truncated,
        ));
    }
    Ok(out)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
