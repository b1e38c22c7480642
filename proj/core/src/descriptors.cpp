#include "hidsense/descriptors.hpp"

#include <cstdio>
#include <sstream>

namespace hidsense::descriptors {

namespace {

void put16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::uint16_t get16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

[[noreturn]] void bad_field(std::string_view descriptor, std::string_view field,
                            const std::string& why) {
  throw SerializeError(std::string(descriptor) + "." + std::string(field) + ": " + why);
}

void expect_header(std::span<const std::uint8_t> b, std::size_t length, std::uint8_t type,
                   std::string_view what) {
  if (b.size() < length) {
    throw ParseError(std::string(what) + " descriptor truncated: " + std::to_string(b.size()) +
                     " of " + std::to_string(length) + " bytes");
  }
  if (b[0] != length) {
    throw ParseError(std::string(what) + " descriptor bLength " + std::to_string(b[0]) +
                     ", expected " + std::to_string(length));
  }
  if (b[1] != type) {
    throw ParseError(std::string(what) + " descriptor bDescriptorType 0x" + hex_byte(b[1]) +
                     ", expected 0x" + hex_byte(type));
  }
}

// UTF-8 <-> UTF-16 for string descriptors.
std::u16string utf8_to_utf16(std::string_view s) {
  std::u16string out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::uint32_t cp = 0;
    int extra = 0;
    if (c < 0x80) {
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      cp = c & 0x1F;
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      cp = c & 0x0F;
      extra = 2;
    } else if ((c & 0xF8) == 0xF0) {
      cp = c & 0x07;
      extra = 3;
    } else {
      throw SerializeError("string: invalid UTF-8 lead byte");
    }
    if (i + static_cast<std::size_t>(extra) >= s.size()) {
      throw SerializeError("string: truncated UTF-8 sequence");
    }
    for (int k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
      if ((cc & 0xC0) != 0x80) throw SerializeError("string: invalid UTF-8 continuation");
      cp = (cp << 6) | (cc & 0x3F);
    }
    i += static_cast<std::size_t>(extra) + 1;
    if (cp >= 0x10000) {
      cp -= 0x10000;
      out.push_back(static_cast<char16_t>(0xD800 + (cp >> 10)));
      out.push_back(static_cast<char16_t>(0xDC00 + (cp & 0x3FF)));
    } else {
      out.push_back(static_cast<char16_t>(cp));
    }
  }
  return out;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace

std::uint16_t ConfigurationTree::computed_total_length() const {
  return static_cast<std::uint16_t>(kConfigurationLength + kInterfaceLength + kHidLength +
                                    kEndpointLength * endpoints.size());
}

const EndpointDescriptor* ConfigurationTree::find_endpoint(std::uint8_t address) const {
  for (const auto& ep : endpoints) {
    if (ep.address == address) return &ep;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------

Bytes serialize(const DeviceDescriptor& d) {
  switch (d.max_packet_size0) {
    case 8: case 16: case 32: case 64: break;
    default: bad_field("device", "bMaxPacketSize0", "must be 8, 16, 32 or 64");
  }
  if (d.num_configurations == 0) bad_field("device", "bNumConfigurations", "must be >= 1");
  Bytes out;
  out.reserve(kDeviceLength);
  out.push_back(kDeviceLength);
  out.push_back(type::kDevice);
  put16(out, d.bcd_usb);
  out.push_back(d.device_class);
  out.push_back(d.device_subclass);
  out.push_back(d.device_protocol);
  out.push_back(d.max_packet_size0);
  put16(out, d.vid);
  put16(out, d.pid);
  put16(out, d.bcd_device);
  out.push_back(d.i_manufacturer);
  out.push_back(d.i_product);
  out.push_back(d.i_serial);
  out.push_back(d.num_configurations);
  return out;
}

Bytes serialize(const ConfigurationDescriptor& d) {
  if ((d.attributes & 0x80) == 0) bad_field("configuration", "bmAttributes", "bit 7 must be set");
  if ((d.attributes & 0x1F) != 0) {
    bad_field("configuration", "bmAttributes", "bits 4..0 are reserved");
  }
  if (d.total_length < kConfigurationLength) {
    bad_field("configuration", "wTotalLength", "shorter than the descriptor itself");
  }
  Bytes out;
  out.push_back(kConfigurationLength);
  out.push_back(type::kConfiguration);
  put16(out, d.total_length);
  out.push_back(d.num_interfaces);
  out.push_back(d.configuration_value);
  out.push_back(d.i_configuration);
  out.push_back(d.attributes);
  out.push_back(d.max_power);
  return out;
}

Bytes serialize(const InterfaceDescriptor& d) {
  return Bytes{kInterfaceLength,     type::kInterface,     d.interface_number,
               d.alternate_setting,  d.num_endpoints,      d.interface_class,
               d.interface_subclass, d.interface_protocol, d.i_interface};
}

Bytes serialize(const HidDescriptor& d) {
  if (d.num_descriptors != 1) {
    bad_field("hid", "bNumDescriptors", "only a single class descriptor is supported");
  }
  Bytes out;
  out.push_back(kHidLength);
  out.push_back(type::kHid);
  put16(out, d.bcd_hid);
  out.push_back(d.country_code);
  out.push_back(d.num_descriptors);
  out.push_back(d.report_descriptor_type);
  put16(out, d.report_descriptor_length);
  return out;
}

Bytes serialize(const EndpointDescriptor& d) {
  if ((d.address & 0x70) != 0) bad_field("endpoint", "bEndpointAddress", "bits 6..4 are reserved");
  if (d.number() == 0) bad_field("endpoint", "bEndpointAddress", "endpoint 0 has no descriptor");
  if (d.transfer_type == TransferType::Interrupt) {
    if (d.max_packet_size > 64) {
      bad_field("endpoint", "wMaxPacketSize", "full-speed interrupt endpoints carry at most 64");
    }
    if (d.interval_ms == 0) bad_field("endpoint", "bInterval", "must be 1..255 ms");
  }
  Bytes out;
  out.push_back(kEndpointLength);
  out.push_back(type::kEndpoint);
  out.push_back(d.address);
  out.push_back(static_cast<std::uint8_t>(d.transfer_type));
  put16(out, d.max_packet_size);
  out.push_back(d.interval_ms);
  return out;
}

Bytes serialize(const ConfigurationTree& tree) {
  if (tree.config.total_length != tree.computed_total_length()) {
    bad_field("configuration", "wTotalLength",
              std::to_string(tree.config.total_length) + " but the tree serializes to " +
                  std::to_string(tree.computed_total_length()) + " bytes");
  }
  if (tree.config.num_interfaces != 1) bad_field("configuration", "bNumInterfaces", "must be 1");
  if (tree.interface.num_endpoints != tree.endpoints.size()) {
    bad_field("interface", "bNumEndpoints", "does not match the endpoint list");
  }
  Bytes out = serialize(tree.config);
  for (const Bytes& part : {serialize(tree.interface), serialize(tree.hid)}) {
    out.insert(out.end(), part.begin(), part.end());
  }
  for (const auto& ep : tree.endpoints) {
    const Bytes part = serialize(ep);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

DeviceDescriptor parse_device_descriptor(std::span<const std::uint8_t> b) {
  expect_header(b, kDeviceLength, type::kDevice, "device");
  DeviceDescriptor d;
  d.bcd_usb = get16(b, 2);
  d.device_class = b[4];
  d.device_subclass = b[5];
  d.device_protocol = b[6];
  d.max_packet_size0 = b[7];
  d.vid = get16(b, 8);
  d.pid = get16(b, 10);
  d.bcd_device = get16(b, 12);
  d.i_manufacturer = b[14];
  d.i_product = b[15];
  d.i_serial = b[16];
  d.num_configurations = b[17];
  return d;
}

ConfigurationTree parse_configuration_tree(std::span<const std::uint8_t> bytes, ParseMode mode,
                                           std::vector<std::string>* warnings) {
  if (bytes.size() < 2 || bytes[1] != type::kConfiguration) {
    throw ParseError("missing configuration descriptor");
  }
  expect_header(bytes, kConfigurationLength, type::kConfiguration, "configuration");
  ConfigurationTree tree;
  tree.config.total_length = get16(bytes, 2);
  tree.config.num_interfaces = bytes[4];
  tree.config.configuration_value = bytes[5];
  tree.config.i_configuration = bytes[6];
  tree.config.attributes = bytes[7];
  tree.config.max_power = bytes[8];

  bool have_interface = false;
  bool have_hid = false;
  std::size_t at = kConfigurationLength;
  while (at < bytes.size()) {
    const auto rest = bytes.subspan(at);
    if (rest.size() < 2) throw ParseError("trailing byte at offset " + std::to_string(at));
    const std::size_t len = rest[0];
    if (len < 2) {
      throw ParseError("descriptor at offset " + std::to_string(at) + " has bLength " +
                       std::to_string(len));
    }
    if (len > rest.size()) {
      throw ParseError("descriptor at offset " + std::to_string(at) + " truncated");
    }
    const auto d = rest.first(len);
    switch (d[1]) {
      case type::kInterface:
        if (have_interface) throw ParseError("more than one interface descriptor");
        expect_header(d, kInterfaceLength, type::kInterface, "interface");
        tree.interface = InterfaceDescriptor{d[2], d[3], d[4], d[5], d[6], d[7], d[8]};
        have_interface = true;
        break;
      case type::kHid:
        if (!have_interface) throw ParseError("HID descriptor before interface descriptor");
        expect_header(d, kHidLength, type::kHid, "HID");
        tree.hid = HidDescriptor{get16(d, 2), d[4], d[5], d[6], get16(d, 7)};
        have_hid = true;
        break;
      case type::kEndpoint: {
        if (!have_interface) throw ParseError("endpoint descriptor before interface descriptor");
        expect_header(d, kEndpointLength, type::kEndpoint, "endpoint");
        EndpointDescriptor ep;
        ep.address = d[2];
        ep.transfer_type = static_cast<TransferType>(d[3] & 0x03);
        ep.max_packet_size = get16(d, 4);
        ep.interval_ms = d[6];
        tree.endpoints.push_back(ep);
        break;
      }
      default: {
        const std::string msg = "unknown descriptor type 0x" + hex_byte(d[1]) + " at offset " +
                                std::to_string(at);
        if (mode == ParseMode::Strict) throw ParseError(msg);
        if (warnings != nullptr) warnings->push_back(msg + " skipped");
        break;
      }
    }
    at += len;
  }
  if (!have_interface) throw ParseError("missing interface descriptor");
  if (!have_hid) throw ParseError("missing HID descriptor");
  if (tree.config.total_length != at) {
    throw ParseError("wTotalLength " + std::to_string(tree.config.total_length) +
                     " does not match " + std::to_string(at) + " bytes of descriptors");
  }
  if (tree.interface.num_endpoints != tree.endpoints.size()) {
    throw ParseError("bNumEndpoints " + std::to_string(tree.interface.num_endpoints) + " but " +
                     std::to_string(tree.endpoints.size()) + " endpoint descriptors follow");
  }
  return tree;
}

// ---------------------------------------------------------------------------

Bytes encode_string_descriptor(std::string_view text) {
  const std::u16string units = utf8_to_utf16(text);
  if (units.size() > kMaxStringUnits) {
    throw SerializeError("string: " + std::to_string(units.size()) +
                         " UTF-16 units exceed the 126 that fit in bLength");
  }
  Bytes out;
  out.reserve(2 + 2 * units.size());
  out.push_back(static_cast<std::uint8_t>(2 + 2 * units.size()));
  out.push_back(type::kString);
  for (char16_t u : units) put16(out, static_cast<std::uint16_t>(u));
  return out;
}

std::string decode_string_descriptor(std::span<const std::uint8_t> b) {
  if (b.size() < 2) throw ParseError("string descriptor truncated");
  if (b[1] != type::kString) throw ParseError("not a string descriptor (type 0x" + hex_byte(b[1]) + ")");
  const std::size_t len = b[0];
  if (len < 2 || len % 2 != 0) throw ParseError("string descriptor bLength must be even and >= 2");
  if (len > b.size()) throw ParseError("string descriptor truncated");
  std::string out;
  for (std::size_t i = 2; i < len; i += 2) {
    std::uint32_t u = get16(b, i);
    if (u >= 0xD800 && u < 0xDC00 && i + 2 < len) {
      const std::uint32_t lo = get16(b, i + 2);
      if (lo >= 0xDC00 && lo < 0xE000) {
        u = 0x10000 + ((u - 0xD800) << 10) + (lo - 0xDC00);
        i += 2;
      }
    }
    append_utf8(out, u);
  }
  return out;
}

Bytes encode_langid_descriptor(const std::vector<std::uint16_t>& langids) {
  if (langids.size() > kMaxStringUnits) throw SerializeError("string0: too many LangIDs");
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(2 + 2 * langids.size()));
  out.push_back(type::kString);
  for (auto id : langids) put16(out, id);
  return out;
}

std::vector<std::uint16_t> decode_langid_descriptor(std::span<const std::uint8_t> b) {
  if (b.size() < 2 || b[1] != type::kString) throw ParseError("not a string descriptor");
  const std::size_t len = b[0];
  if (len < 2 || len % 2 != 0 || len > b.size()) throw ParseError("bad LangID descriptor length");
  std::vector<std::uint16_t> out;
  for (std::size_t i = 2; i < len; i += 2) out.push_back(get16(b, i));
  return out;
}

std::optional<Bytes> StringTable::descriptor(std::uint8_t index) const {
  if (index == 0) return encode_langid_descriptor(langids);
  if (index > strings.size()) return std::nullopt;
  return encode_string_descriptor(strings[index - 1]);
}

// ---------------------------------------------------------------------------

DescriptorSet build_reference_descriptor_set(std::uint8_t ep0_packet_size) {
  DescriptorSet set;
  set.device.bcd_usb = 0x0200;
  set.device.max_packet_size0 = ep0_packet_size;
  set.device.vid = kReferenceVendorId;
  set.device.pid = kReferenceProductId;
  set.device.bcd_device = 0x0001;
  set.device.i_manufacturer = 1;
  set.device.i_product = 2;
  set.device.i_serial = 0;
  set.device.num_configurations = 1;

  set.report = build_reference_report_descriptor();

  auto& tree = set.configuration;
  tree.config.num_interfaces = 1;
  tree.config.configuration_value = 1;
  tree.config.attributes = 0xA0;  // bus powered, remote wakeup
  tree.config.max_power = 50;     // 100 mA
  tree.interface.num_endpoints = 2;
  tree.interface.interface_class = 0x03;
  tree.hid.bcd_hid = 0x0101;
  tree.hid.report_descriptor_length = static_cast<std::uint16_t>(serialize(set.report).size());
  tree.endpoints = {
      EndpointDescriptor{0x81, TransferType::Interrupt, kHidPacketSize, 1},
      EndpointDescriptor{0x01, TransferType::Interrupt, kHidPacketSize, 1},
  };
  tree.config.total_length = tree.computed_total_length();

  set.strings.langids = {kLangIdEnglishUs};
  set.strings.strings = {"mikroElektronika", "mikroC HID Library test"};
  return set;
}

// ---------------------------------------------------------------------------

namespace {

struct FieldSpec {
  const char* name;
  std::size_t size;
};

std::string field_value(std::string_view name, std::uint32_t v, std::size_t size) {
  char buf[48];
  if (name == "bDescriptorType") {
    switch (v) {
      case type::kDevice: return "DEVICE";
      case type::kConfiguration: return "CONFIGURATION";
      case type::kString: return "STRING";
      case type::kInterface: return "INTERFACE";
      case type::kEndpoint: return "ENDPOINT";
      case type::kHid: return "HID";
      case type::kReport: return "REPORT";
      default: break;
    }
  }
  if (name == "bcdUSB" || name == "bcdHID" || name == "bcdDevice") {
    std::snprintf(buf, sizeof buf, "%X.%02X", v >> 8, v & 0xFF);
    return buf;
  }
  if (name == "bEndpointAddress") {
    std::snprintf(buf, sizeof buf, "%s EP%u", (v & 0x80) ? "IN" : "OUT", v & 0x0F);
    return buf;
  }
  if (name == "bmAttributes (endpoint)") {
    static constexpr const char* kTypes[] = {"Control", "Isochronous", "Bulk", "Interrupt"};
    return kTypes[v & 0x03];
  }
  if (name == "bMaxPower") {
    std::snprintf(buf, sizeof buf, "%u mA", v * 2);
    return buf;
  }
  if (size == 2) {
    std::snprintf(buf, sizeof buf, "0x%04X (%u)", v, v);
  } else {
    std::snprintf(buf, sizeof buf, "0x%02X (%u)", v, v);
  }
  return buf;
}

void annotate_fields(std::span<const std::uint8_t> b, std::size_t base,
                     std::initializer_list<FieldSpec> fields, std::string_view prefix,
                     std::vector<Annotation>& out) {
  std::size_t at = 0;
  for (const auto& f : fields) {
    if (at + f.size > b.size()) {
      throw ParseError(std::string(prefix) + f.name + " truncated at offset " +
                       std::to_string(base + at));
    }
    std::uint32_t v = b[at];
    if (f.size == 2) v = get16(b, at);
    std::string shown = f.name;
    const auto key = shown;
    if (shown == "bmAttributes (endpoint)") shown = "bmAttributes";
    out.push_back(Annotation{base + at, Bytes(b.begin() + static_cast<std::ptrdiff_t>(at),
                                              b.begin() + static_cast<std::ptrdiff_t>(at + f.size)),
                             std::string(prefix) + shown, field_value(key, v, f.size)});
    at += f.size;
  }
}

constexpr std::initializer_list<FieldSpec> kDeviceFields = {
    {"bLength", 1},         {"bDescriptorType", 1}, {"bcdUSB", 2},
    {"bDeviceClass", 1},    {"bDeviceSubClass", 1}, {"bDeviceProtocol", 1},
    {"bMaxPacketSize0", 1}, {"idVendor", 2},        {"idProduct", 2},
    {"bcdDevice", 2},       {"iManufacturer", 1},   {"iProduct", 1},
    {"iSerialNumber", 1},   {"bNumConfigurations", 1},
};

}  // namespace

std::vector<Annotation> annotate_device(std::span<const std::uint8_t> bytes) {
  std::vector<Annotation> out;
  annotate_fields(bytes, 0, kDeviceFields, "", out);
  return out;
}

std::vector<Annotation> annotate_configuration(std::span<const std::uint8_t> bytes) {
  std::vector<Annotation> out;
  std::size_t at = 0;
  while (at + 2 <= bytes.size()) {
    const std::size_t len = bytes[at];
    if (len < 2 || at + len > bytes.size()) {
      throw ParseError("descriptor at offset " + std::to_string(at) + " has bad bLength");
    }
    const auto d = bytes.subspan(at, len);
    switch (d[1]) {
      case type::kConfiguration:
        annotate_fields(d, at,
                        {{"bLength", 1}, {"bDescriptorType", 1}, {"wTotalLength", 2},
                         {"bNumInterfaces", 1}, {"bConfigurationValue", 1},
                         {"iConfiguration", 1}, {"bmAttributes", 1}, {"bMaxPower", 1}},
                        "config.", out);
        break;
      case type::kInterface:
        annotate_fields(d, at,
                        {{"bLength", 1}, {"bDescriptorType", 1}, {"bInterfaceNumber", 1},
                         {"bAlternateSetting", 1}, {"bNumEndpoints", 1},
                         {"bInterfaceClass", 1}, {"bInterfaceSubClass", 1},
                         {"bInterfaceProtocol", 1}, {"iInterface", 1}},
                        "interface.", out);
        break;
      case type::kHid:
        annotate_fields(d, at,
                        {{"bLength", 1}, {"bDescriptorType", 1}, {"bcdHID", 2},
                         {"bCountryCode", 1}, {"bNumDescriptors", 1},
                         {"bDescriptorType", 1}, {"wDescriptorLength", 2}},
                        "hid.", out);
        break;
      case type::kEndpoint:
        annotate_fields(d, at,
                        {{"bLength", 1}, {"bDescriptorType", 1}, {"bEndpointAddress", 1},
                         {"bmAttributes (endpoint)", 1}, {"wMaxPacketSize", 2},
                         {"bInterval", 1}},
                        "endpoint.", out);
        break;
      default:
        out.push_back(Annotation{at, Bytes(d.begin(), d.end()), "unknown",
                                 "type 0x" + hex_byte(d[1])});
        break;
    }
    at += len;
  }
  return out;
}

std::vector<Annotation> annotate_string(std::span<const std::uint8_t> bytes, bool langid) {
  std::vector<Annotation> out;
  annotate_fields(bytes, 0, {{"bLength", 1}, {"bDescriptorType", 1}}, "", out);
  const auto body = bytes.subspan(2);
  if (langid) {
    const auto ids = decode_langid_descriptor(bytes);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "0x%04X", ids[i]);
      out.push_back(Annotation{2 + 2 * i, Bytes(body.begin() + static_cast<std::ptrdiff_t>(2 * i),
                                                body.begin() + static_cast<std::ptrdiff_t>(2 * i + 2)),
                               "wLANGID[" + std::to_string(i) + "]", buf});
    }
  } else {
    out.push_back(Annotation{2, Bytes(body.begin(), body.end()), "bString",
                             "\"" + decode_string_descriptor(bytes) + "\""});
  }
  return out;
}

std::string render_annotations(const std::vector<Annotation>& rows) {
  std::ostringstream out;
  for (const auto& row : rows) {
    char offset[16];
    std::snprintf(offset, sizeof offset, "%04zX", row.offset);
    std::string hex = hex_bytes(row.bytes);
    if (hex.size() > 23) hex = hex.substr(0, 20) + "...";
    out << offset << "  ";
    out << hex << std::string(hex.size() < 24 ? 24 - hex.size() : 1, ' ');
    out << row.field << std::string(row.field.size() < 28 ? 28 - row.field.size() : 1, ' ');
    out << row.value << '\n';
  }
  return out.str();
}

}  // namespace hidsense::descriptors
