#include "hidsense/descriptors.hpp"

#include <cstdio>

namespace hidsense::descriptors {

namespace {

std::uint8_t size_code(std::uint8_t size) {
  switch (size) {
    case 0: return 0;
    case 1: return 1;
    case 2: return 2;
    case 4: return 3;
    default: throw SerializeError("report item: data size " + std::to_string(size) + " is not 0/1/2/4");
  }
}

constexpr std::uint8_t kLongItemPrefix = 0xFE;

}  // namespace

std::uint8_t HidItem::prefix() const {
  return static_cast<std::uint8_t>((tag << 4) | (static_cast<std::uint8_t>(type) << 2) |
                                   size_code(size));
}

std::string HidItem::name() const {
  switch (type) {
    case ItemType::Main:
      switch (tag) {
        case tag::kInput: return "INPUT";
        case tag::kOutput: return "OUTPUT";
        case tag::kCollection: return "COLLECTION";
        case tag::kFeature: return "FEATURE";
        case tag::kEndCollection: return "END_COLLECTION";
        default: break;
      }
      break;
    case ItemType::Global:
      switch (tag) {
        case tag::kUsagePage: return "USAGE_PAGE";
        case tag::kLogicalMinimum: return "LOGICAL_MINIMUM";
        case tag::kLogicalMaximum: return "LOGICAL_MAXIMUM";
        case tag::kPhysicalMinimum: return "PHYSICAL_MINIMUM";
        case tag::kPhysicalMaximum: return "PHYSICAL_MAXIMUM";
        case tag::kUnitExponent: return "UNIT_EXPONENT";
        case tag::kUnit: return "UNIT";
        case tag::kReportSize: return "REPORT_SIZE";
        case tag::kReportId: return "REPORT_ID";
        case tag::kReportCount: return "REPORT_COUNT";
        case tag::kPush: return "PUSH";
        case tag::kPop: return "POP";
        default: break;
      }
      break;
    case ItemType::Local:
      switch (tag) {
        case tag::kUsage: return "USAGE";
        case tag::kUsageMinimum: return "USAGE_MINIMUM";
        case tag::kUsageMaximum: return "USAGE_MAXIMUM";
        default: break;
      }
      break;
    case ItemType::Reserved:
      break;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "ITEM(type=%u,tag=0x%X)", static_cast<unsigned>(type), tag);
  return buf;
}

HidItem make_item(ItemType type, std::uint8_t tag, std::uint32_t data) {
  const std::uint8_t size = data <= 0xFF ? 1 : data <= 0xFFFF ? 2 : 4;
  return make_item(type, tag, data, size);
}

HidItem make_item(ItemType type, std::uint8_t tag, std::uint32_t data, std::uint8_t size) {
  HidItem item{tag, type, size, data};
  size_code(size);
  if (size < 4 && (data >> (8 * size)) != 0) {
    throw SerializeError("report item " + item.name() + ": data does not fit in " +
                         std::to_string(size) + " byte(s)");
  }
  return item;
}

ReportSummary ReportDescriptor::summary() const {
  struct Globals {
    std::uint32_t report_size = 0;
    std::uint32_t report_count = 0;
  };
  std::vector<Globals> stack;
  Globals g;
  std::size_t input_bits = 0;
  std::size_t output_bits = 0;
  std::size_t feature_bits = 0;
  for (const auto& item : items) {
    if (item.type == ItemType::Global) {
      switch (item.tag) {
        case tag::kReportSize: g.report_size = item.data; break;
        case tag::kReportCount: g.report_count = item.data; break;
        case tag::kPush: stack.push_back(g); break;
        case tag::kPop:
          if (!stack.empty()) {
            g = stack.back();
            stack.pop_back();
          }
          break;
        default: break;
      }
    } else if (item.type == ItemType::Main) {
      const std::size_t bits = static_cast<std::size_t>(g.report_size) * g.report_count;
      if (item.tag == tag::kInput) input_bits += bits;
      if (item.tag == tag::kOutput) output_bits += bits;
      if (item.tag == tag::kFeature) feature_bits += bits;
    }
  }
  return ReportSummary{(input_bits + 7) / 8, (output_bits + 7) / 8, (feature_bits + 7) / 8};
}

ReportDescriptor parse_report_descriptor(std::span<const std::uint8_t> bytes) {
  ReportDescriptor out;
  int depth = 0;
  std::size_t at = 0;
  while (at < bytes.size()) {
    const std::uint8_t prefix = bytes[at];
    if (prefix == kLongItemPrefix) {
      throw ParseError("long item at offset " + std::to_string(at) + " is not supported");
    }
    static constexpr std::uint8_t kSizes[] = {0, 1, 2, 4};
    const std::uint8_t size = kSizes[prefix & 0x03];
    if (at + 1 + size > bytes.size()) {
      throw ParseError("truncated " + std::to_string(size) + "-byte item at offset " +
                       std::to_string(at));
    }
    HidItem item;
    item.tag = static_cast<std::uint8_t>(prefix >> 4);
    item.type = static_cast<ItemType>((prefix >> 2) & 0x03);
    item.size = size;
    for (std::uint8_t k = 0; k < size; ++k) {
      item.data |= static_cast<std::uint32_t>(bytes[at + 1 + k]) << (8 * k);
    }
    if (item.type == ItemType::Main && item.tag == tag::kCollection) ++depth;
    if (item.type == ItemType::Main && item.tag == tag::kEndCollection) {
      if (depth == 0) {
        throw ParseError("END_COLLECTION without COLLECTION at offset " + std::to_string(at));
      }
      --depth;
    }
    out.items.push_back(item);
    at += 1 + size;
  }
  if (depth != 0) throw ParseError(std::to_string(depth) + " unclosed COLLECTION(s)");
  return out;
}

Bytes serialize(const ReportDescriptor& report) {
  Bytes out;
  for (const auto& item : report.items) {
    if (item.type == ItemType::Reserved && item.tag == 0xF) {
      throw SerializeError("report item: long items are not supported");
    }
    if (item.size < 4 && (item.data >> (8 * item.size)) != 0) {
      throw SerializeError("report item " + item.name() + ": data does not fit in " +
                           std::to_string(item.size) + " byte(s)");
    }
    out.push_back(item.prefix());
    for (std::uint8_t k = 0; k < item.size; ++k) {
      out.push_back(static_cast<std::uint8_t>(item.data >> (8 * k)));
    }
  }
  return out;
}

ReportDescriptor build_reference_report_descriptor() {
  using enum ItemType;
  ReportDescriptor d;
  auto& items = d.items;
  items.push_back(make_item(Global, tag::kUsagePage, 0xFFA0, 2));  // vendor defined
  items.push_back(make_item(Local, tag::kUsage, 0x01, 1));
  items.push_back(make_item(Main, tag::kCollection, 0x01, 1));  // application

  // Input, output and feature reports differ only in usage and count.
  struct Report {
    std::uint8_t usage;
    std::uint8_t count;
    std::uint8_t main_tag;
  };
  for (const Report r : {Report{0x03, 4, tag::kInput}, Report{0x04, 4, tag::kOutput},
                         Report{0x05, 2, tag::kFeature}}) {
    items.push_back(make_item(Local, tag::kUsage, r.usage, 1));
    items.push_back(make_item(Global, tag::kLogicalMinimum, 0, 1));
    // 255 needs two bytes: logical extents are signed.
    items.push_back(make_item(Global, tag::kLogicalMaximum, 255, 2));
    items.push_back(make_item(Global, tag::kReportSize, 8, 1));
    items.push_back(make_item(Global, tag::kReportCount, r.count, 1));
    items.push_back(make_item(Main, r.main_tag, 0x02, 1));  // Data, Var, Abs
  }
  items.push_back(make_item(Main, tag::kEndCollection, 0, 0));
  return d;
}

std::vector<Annotation> annotate_report(std::span<const std::uint8_t> bytes) {
  const ReportDescriptor d = parse_report_descriptor(bytes);
  std::vector<Annotation> out;
  std::size_t at = 0;
  int depth = 0;
  for (const auto& item : d.items) {
    if (item.type == ItemType::Main && item.tag == tag::kEndCollection) --depth;
    char value[32] = "";
    if (item.size > 0) {
      std::snprintf(value, sizeof value, "0x%0*X (%u)", item.size * 2, item.data, item.data);
    }
    const auto len = static_cast<std::ptrdiff_t>(1 + item.size);
    out.push_back(Annotation{at,
                             Bytes(bytes.begin() + static_cast<std::ptrdiff_t>(at),
                                   bytes.begin() + static_cast<std::ptrdiff_t>(at) + len),
                             std::string(static_cast<std::size_t>(2 * depth), ' ') + item.name(),
                             value});
    if (item.type == ItemType::Main && item.tag == tag::kCollection) ++depth;
    at += static_cast<std::size_t>(len);
  }
  return out;
}

}  // namespace hidsense::descriptors
