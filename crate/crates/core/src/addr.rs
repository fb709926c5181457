//! Canonical forms for network addresses and IPv4 subnet arithmetic.
//!
//! Adapters normalize every address on the way in, so the rest of the
//! pipeline can compare addresses textually. IPv4 becomes a dotted quad
//! without leading zeros, IPv6 the RFC 5952 compressed lowercase form, and
//! MAC addresses lowercase colon-separated octet pairs.

use std::net::{Ipv4Addr, Ipv6Addr};

/// Normalizes an IP address string, returning `None` when the input is not
/// a parseable IPv4 or IPv6 address.
pub fn canonical_ip(raw: &str) -> Option<String> {
    let s = raw.trim();
    if s.is_empty() {
        return None;
    }
    if s.contains(':') {
        return s.parse::<Ipv6Addr>().ok().map(|a| a.to_string());
    }
    let mut octets = [0u8; 4];
    let mut count = 0;
    for part in s.split('.') {
        if count == 4 || part.is_empty() || part.len() > 3 {
            return None;
        }
        if !part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let value: u16 = part.parse().ok()?;
        if value > 255 {
            return None;
        }
        octets[count] = value as u8;
        count += 1;
    }
    if count != 4 {
        return None;
    }
    Some(Ipv4Addr::from(octets).to_string())
}

/// Normalizes a MAC address, accepting `:`, `-`, and `.` separators. The
/// result is six lowercase hex pairs joined by colons, or `None` when the
/// input does not contain exactly twelve hex digits.
pub fn canonical_mac(raw: &str) -> Option<String> {
    let s = raw.trim();
    if s.is_empty() {
        return None;
    }
    let mut digits = String::with_capacity(12);
    for c in s.chars() {
        if c.is_ascii_hexdigit() {
            digits.push(c.to_ascii_lowercase());
        } else if !matches!(c, ':' | '-' | '.') {
            return None;
        }
    }
    if digits.len() != 12 {
        return None;
    }
    let pairs: Vec<&str> = (0..6).map(|i| &digits[2 * i..2 * i + 2]).collect();
    Some(pairs.join(":"))
}

/// Returns the `address/len` CIDR block containing a canonical IPv4 address,
/// or `None` for IPv6 or unparseable input. `prefix_len` must be at most 32.
pub fn ipv4_subnet(ip: &str, prefix_len: u8) -> Option<String> {
    if prefix_len > 32 {
        return None;
    }
    let addr: Ipv4Addr = ip.parse().ok()?;
    let bits = u32::from(addr);
    let mask = if prefix_len == 0 {
        0
    } else {
        u32::MAX << (32 - prefix_len)
    };
    Some(format!("{}/{}", Ipv4Addr::from(bits & mask), prefix_len))
}
