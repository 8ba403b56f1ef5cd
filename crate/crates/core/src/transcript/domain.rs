use std::net::IpAddr;

use url::Url;

/// Registrable domain of `raw_url`, lowercased.
///
/// Uses the public suffix list compiled into the `psl` crate; hosts under a
/// suffix the list does not know fall back to their last two labels. IP
/// addresses and single-label hosts are returned as-is. Scheme-less input
/// such as `brand.com/page` is accepted.
pub fn registrable_domain(raw_url: &str) -> Option<String> {
    let raw = raw_url.trim();
    if raw.is_empty() {
        return None;
    }
    let parsed = Url::parse(raw)
        .ok()
        .filter(|u| u.has_host())
        .or_else(|| {
            (!raw.contains("://"))
                .then(|| Url::parse(&format!("http://{raw}")).ok())
                .flatten()
        })?;
    let host = parsed.host_str()?.trim_end_matches('.').to_lowercase();
    if host.is_empty() {
        return None;
    }
    let bare = host.trim_start_matches('[').trim_end_matches(']');
    if bare.parse::<IpAddr>().is_ok() || !host.contains('.') {
        return Some(host);
    }
    let domain = psl::domain_str(&host)
        .map(str::to_string)
        .unwrap_or_else(|| last_two_labels(&host));
    Some(domain)
}

fn last_two_labels(host: &str) -> String {
    let labels: Vec<&str> = host.rsplitn(3, '.').take(2).collect();
    labels.into_iter().rev().collect::<Vec<_>>().join(".")
}

/// True when `domain` equals `owned` or is a subdomain of it.
pub(crate) fn domain_matches(domain: &str, owned: &str) -> bool {
    domain == owned
        || domain
            .strip_suffix(owned)
            .is_some_and(|prefix| prefix.ends_with('.'))
}
