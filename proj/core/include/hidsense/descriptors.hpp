#pragma once

// USB descriptors for the HID temperature sensor: building the reference set,
// byte-exact serialization, and parsers for arbitrary input.

#include "hidsense/common.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hidsense::descriptors {

namespace type {
constexpr std::uint8_t kDevice = 0x01;
constexpr std::uint8_t kConfiguration = 0x02;
constexpr std::uint8_t kString = 0x03;
constexpr std::uint8_t kInterface = 0x04;
constexpr std::uint8_t kEndpoint = 0x05;
constexpr std::uint8_t kHid = 0x21;
constexpr std::uint8_t kReport = 0x22;
}  // namespace type

constexpr std::size_t kDeviceLength = 18;
constexpr std::size_t kConfigurationLength = 9;
constexpr std::size_t kInterfaceLength = 9;
constexpr std::size_t kHidLength = 9;
constexpr std::size_t kEndpointLength = 7;

constexpr std::uint16_t kReferenceVendorId = 0x1234;  // 4660
constexpr std::uint16_t kReferenceProductId = 0x0001;
/// EP0 size is not given by the reference tables; 8 is the smallest legal
/// full-speed value.
constexpr std::uint8_t kDefaultEp0PacketSize = 8;
/// Interrupt endpoint wMaxPacketSize, matching the 4-byte reports.
constexpr std::uint16_t kHidPacketSize = 4;
constexpr std::uint16_t kLangIdEnglishUs = 0x0409;

struct DeviceDescriptor {
  std::uint16_t bcd_usb = 0x0200;
  std::uint8_t device_class = 0;
  std::uint8_t device_subclass = 0;
  std::uint8_t device_protocol = 0;
  std::uint8_t max_packet_size0 = kDefaultEp0PacketSize;
  std::uint16_t vid = 0;
  std::uint16_t pid = 0;
  std::uint16_t bcd_device = 0;
  std::uint8_t i_manufacturer = 0;
  std::uint8_t i_product = 0;
  std::uint8_t i_serial = 0;
  std::uint8_t num_configurations = 1;

  friend bool operator==(const DeviceDescriptor&, const DeviceDescriptor&) = default;
};

struct ConfigurationDescriptor {
  /// wTotalLength as stored; serialize() recomputes and checks it.
  std::uint16_t total_length = 0;
  std::uint8_t num_interfaces = 1;
  std::uint8_t configuration_value = 1;
  std::uint8_t i_configuration = 0;
  std::uint8_t attributes = 0xA0;
  std::uint8_t max_power = 50;  // units of 2 mA

  friend bool operator==(const ConfigurationDescriptor&, const ConfigurationDescriptor&) = default;
};

struct InterfaceDescriptor {
  std::uint8_t interface_number = 0;
  std::uint8_t alternate_setting = 0;
  std::uint8_t num_endpoints = 0;
  std::uint8_t interface_class = 0x03;
  std::uint8_t interface_subclass = 0;
  std::uint8_t interface_protocol = 0;
  std::uint8_t i_interface = 0;

  friend bool operator==(const InterfaceDescriptor&, const InterfaceDescriptor&) = default;
};

struct HidDescriptor {
  std::uint16_t bcd_hid = 0x0101;
  std::uint8_t country_code = 0;
  std::uint8_t num_descriptors = 1;
  std::uint8_t report_descriptor_type = type::kReport;
  std::uint16_t report_descriptor_length = 0;

  friend bool operator==(const HidDescriptor&, const HidDescriptor&) = default;
};

enum class TransferType : std::uint8_t { Control = 0, Isochronous = 1, Bulk = 2, Interrupt = 3 };

struct EndpointDescriptor {
  std::uint8_t address = 0;  // bit 7 = IN, bits 3..0 = number
  TransferType transfer_type = TransferType::Interrupt;
  std::uint16_t max_packet_size = kHidPacketSize;
  std::uint8_t interval_ms = 1;

  bool is_in() const { return (address & 0x80) != 0; }
  int number() const { return address & 0x0F; }

  friend bool operator==(const EndpointDescriptor&, const EndpointDescriptor&) = default;
};

struct ConfigurationTree {
  ConfigurationDescriptor config;
  InterfaceDescriptor interface;
  HidDescriptor hid;
  std::vector<EndpointDescriptor> endpoints;

  /// 9 + 9 + 9 + 7 * endpoints.
  std::uint16_t computed_total_length() const;
  const EndpointDescriptor* find_endpoint(std::uint8_t address) const;

  friend bool operator==(const ConfigurationTree&, const ConfigurationTree&) = default;
};

// ---------------------------------------------------------------------------
// HID report descriptor items

enum class ItemType : std::uint8_t { Main = 0, Global = 1, Local = 2, Reserved = 3 };

namespace tag {
// Main
constexpr std::uint8_t kInput = 0x8;
constexpr std::uint8_t kOutput = 0x9;
constexpr std::uint8_t kCollection = 0xA;
constexpr std::uint8_t kFeature = 0xB;
constexpr std::uint8_t kEndCollection = 0xC;
// Global
constexpr std::uint8_t kUsagePage = 0x0;
constexpr std::uint8_t kLogicalMinimum = 0x1;
constexpr std::uint8_t kLogicalMaximum = 0x2;
constexpr std::uint8_t kPhysicalMinimum = 0x3;
constexpr std::uint8_t kPhysicalMaximum = 0x4;
constexpr std::uint8_t kUnitExponent = 0x5;
constexpr std::uint8_t kUnit = 0x6;
constexpr std::uint8_t kReportSize = 0x7;
constexpr std::uint8_t kReportId = 0x8;
constexpr std::uint8_t kReportCount = 0x9;
constexpr std::uint8_t kPush = 0xA;
constexpr std::uint8_t kPop = 0xB;
// Local
constexpr std::uint8_t kUsage = 0x0;
constexpr std::uint8_t kUsageMinimum = 0x1;
constexpr std::uint8_t kUsageMaximum = 0x2;
}  // namespace tag

/// One short item: prefix byte (tag << 4 | type << 2 | size code) followed by
/// 0, 1, 2 or 4 little-endian data bytes.
struct HidItem {
  std::uint8_t tag = 0;
  ItemType type = ItemType::Main;
  std::uint8_t size = 0;  // data bytes: 0, 1, 2 or 4
  std::uint32_t data = 0;

  std::uint8_t prefix() const;
  /// Conventional item name, e.g. "USAGE_PAGE", "INPUT".
  std::string name() const;

  friend bool operator==(const HidItem&, const HidItem&) = default;
};

/// Smallest-size item holding `data`.
HidItem make_item(ItemType type, std::uint8_t tag, std::uint32_t data);
/// Item with an explicit data size (to reproduce fixed encodings).
HidItem make_item(ItemType type, std::uint8_t tag, std::uint32_t data, std::uint8_t size);

struct ReportSummary {
  std::size_t input_bytes = 0;
  std::size_t output_bytes = 0;
  std::size_t feature_bytes = 0;

  friend bool operator==(const ReportSummary&, const ReportSummary&) = default;
};

struct ReportDescriptor {
  std::vector<HidItem> items;

  /// Report bytes per direction: sum of REPORT_SIZE * REPORT_COUNT / 8 at
  /// each INPUT / OUTPUT / FEATURE item, honoring PUSH / POP.
  ReportSummary summary() const;

  friend bool operator==(const ReportDescriptor&, const ReportDescriptor&) = default;
};

/// Short items only. Throws ParseError on a truncated item, a long item
/// (0xFE), an END_COLLECTION without COLLECTION or an unclosed collection.
ReportDescriptor parse_report_descriptor(std::span<const std::uint8_t> bytes);

// ---------------------------------------------------------------------------
// Strings

constexpr std::size_t kMaxStringUnits = 126;

/// byte0 = 2 + 2 * units, byte1 = 0x03, then UTF-16LE. Input is UTF-8.
/// Throws SerializeError above 126 UTF-16 code units or on invalid UTF-8.
Bytes encode_string_descriptor(std::string_view text);
/// Inverse of encode_string_descriptor, returning UTF-8.
std::string decode_string_descriptor(std::span<const std::uint8_t> bytes);

Bytes encode_langid_descriptor(const std::vector<std::uint16_t>& langids);
std::vector<std::uint16_t> decode_langid_descriptor(std::span<const std::uint8_t> bytes);

struct StringTable {
  std::vector<std::uint16_t> langids{kLangIdEnglishUs};
  /// strings[i] is string descriptor index i + 1.
  std::vector<std::string> strings;

  /// Index 0 yields the LangID descriptor. nullopt for an unknown index.
  std::optional<Bytes> descriptor(std::uint8_t index) const;

  friend bool operator==(const StringTable&, const StringTable&) = default;
};

// ---------------------------------------------------------------------------
// Serialization / parsing

/// Each throws SerializeError naming the offending field.
Bytes serialize(const DeviceDescriptor& d);
Bytes serialize(const ConfigurationDescriptor& d);
Bytes serialize(const InterfaceDescriptor& d);
Bytes serialize(const HidDescriptor& d);
Bytes serialize(const EndpointDescriptor& d);
/// Configuration, interface, HID, then endpoints in order.
Bytes serialize(const ConfigurationTree& tree);
Bytes serialize(const ReportDescriptor& report);

DeviceDescriptor parse_device_descriptor(std::span<const std::uint8_t> bytes);

enum class ParseMode { Strict, Lenient };

/// Walks concatenated descriptors by bLength. Throws ParseError on a missing
/// configuration descriptor, a wTotalLength that disagrees with the bytes
/// consumed, or (Strict) an unknown descriptor type. In Lenient mode unknown
/// descriptors are skipped and reported through `warnings`.
ConfigurationTree parse_configuration_tree(std::span<const std::uint8_t> bytes,
                                           ParseMode mode = ParseMode::Strict,
                                           std::vector<std::string>* warnings = nullptr);

struct DescriptorSet {
  DeviceDescriptor device;
  ConfigurationTree configuration;
  ReportDescriptor report;
  StringTable strings;

  friend bool operator==(const DescriptorSet&, const DescriptorSet&) = default;
};

/// The sensor's descriptor tables: VID 0x1234 / PID 1, one HID interface with
/// interrupt IN 0x81 and OUT 0x01 (4 bytes, 1 ms), vendor usage page 0xFFA0
/// with 4-byte input, 4-byte output and 2-byte feature reports.
DescriptorSet build_reference_descriptor_set(std::uint8_t ep0_packet_size = kDefaultEp0PacketSize);

/// The reference report descriptor (47 bytes).
ReportDescriptor build_reference_report_descriptor();

// ---------------------------------------------------------------------------
// Annotated dumps

struct Annotation {
  std::size_t offset = 0;
  Bytes bytes;
  std::string field;
  std::string value;
};

std::vector<Annotation> annotate_device(std::span<const std::uint8_t> bytes);
std::vector<Annotation> annotate_configuration(std::span<const std::uint8_t> bytes);
std::vector<Annotation> annotate_report(std::span<const std::uint8_t> bytes);
std::vector<Annotation> annotate_string(std::span<const std::uint8_t> bytes, bool langid);

/// One line per annotation: offset, hex, field, value.
std::string render_annotations(const std::vector<Annotation>& rows);

}  // namespace hidsense::descriptors
